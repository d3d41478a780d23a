#pragma once

#include <atomic>
#include <cmath>
#include <functional>
#include <queue>
#include <vector>

#include "stablepert/errors.hpp"

namespace stablepert::quad {

struct Options {
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    int max_intervals = 2000;
    /// Optional cooperative cancellation flag checked between refinements.
    const std::atomic<bool>* cancel = nullptr;
    /// When false, failure to converge returns the best estimate instead
    /// of throwing numerical_error.
    bool throw_on_failure = true;
};

struct Result {
    double value = 0.0;
    double error = 0.0;
    bool converged = true;
};

namespace detail {

// Gauss-Kronrod 7-15 nodes and weights on [-1, 1].
inline constexpr double kKronrodNodes[8] = {
    0.991455371120812639206854697526329,  //
    0.949107912342758524526189684047851,  //
    0.864864423359769072789712788640926,  //
    0.741531185599394439863864773280788,  //
    0.586087235467691130294144838258730,  //
    0.405845151377397166906606412076961,  //
    0.207784955007898467600689403773245,  //
    0.000000000000000000000000000000000};

inline constexpr double kKronrodWeights[8] = {
    0.022935322010529224963732008058970,  //
    0.063092092629978553290700663189204,  //
    0.104790010322250183839876322541518,  //
    0.140653259715525918745189590510238,  //
    0.169004726639267902826583426598550,  //
    0.190350578064785409913256402421014,  //
    0.204432940075298892414161999234649,  //
    0.209482141084727828012999174891714};

inline constexpr double kGaussWeights[4] = {
    0.129484966168869693270611432679082,  //
    0.279705391489276667901467771423780,  //
    0.381830050505118944950369775488975,  //
    0.417959183673469387755102040816327};

struct Interval {
    double a, b, value, error;
    bool operator<(const Interval& o) const { return error < o.error; }
};

template <class F>
Interval gk15(const F& f, double a, double b) {
    const double h = 0.5 * (b - a);
    const double c = 0.5 * (a + b);
    double kron = 0.0, gauss = 0.0;
    for (int i = 0; i < 8; ++i) {
        const double x = h * kKronrodNodes[i];
        double v;
        if (i == 7) {
            v = f(c);
        } else {
            v = f(c - x) + f(c + x);
        }
        kron += kKronrodWeights[i] * v;
        if (i % 2 == 1) gauss += kGaussWeights[i / 2] * v;
    }
    kron *= h;
    gauss *= h;
    const double diff = std::fabs(kron - gauss);
    // Standard QUADPACK-style error sharpening.
    const double err = diff * std::sqrt(diff > 0 ? std::min(1.0, std::sqrt(diff)) : 0.0) + 1e-300;
    return {a, b, kron, std::max(err, std::fabs(kron) * 1e-15)};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod integration of f on [a, b].
template <class F>
Result integrate(const F& f, double a, double b, const Options& opt = {}) {
    if (a == b) return {0.0, 0.0, true};
    std::priority_queue<detail::Interval> heap;
    auto first = detail::gk15(f, a, b);
    double total = first.value;
    double total_err = first.error;
    heap.push(first);
    int n = 1;
    while (total_err > std::max(opt.abs_tol, opt.rel_tol * std::fabs(total)) &&
           n < opt.max_intervals) {
        if (opt.cancel && opt.cancel->load(std::memory_order_relaxed)) throw cancelled_error();
        auto worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b) {
            // Interval at floating-point resolution; accept its estimate.
            total_err -= worst.error;
            continue;
        }
        auto left = detail::gk15(f, worst.a, mid);
        auto right = detail::gk15(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++n;
    }
    const bool ok = total_err <= std::max(opt.abs_tol, opt.rel_tol * std::fabs(total)) * 1.001 ||
                    total_err <= 1e-14 * std::fabs(total);
    if (!ok && opt.throw_on_failure) {
        throw numerical_error("adaptive quadrature did not converge", total_err);
    }
    return {total, total_err, ok};
}

/// Gauss-Legendre nodes/weights on [-1, 1], computed by Newton iteration.
inline void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    nodes.resize(n);
    weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::fabs(dx) < 1e-15) break;
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
}

/// Quadrature rule on the unit sphere S^{d-1}: directions and weights
/// summing to the sphere surface area.  d = 2 uses equally spaced angles
/// (spectrally accurate for periodic integrands); d = 3 a Gauss-Legendre
/// x azimuth product rule.
struct SphereRule {
    std::vector<std::array<double, 3>> dirs;  // only first d entries used
    std::vector<double> weights;
    int dim = 0;
};

inline SphereRule sphere_rule(int d, int n_polar) {
    SphereRule rule;
    rule.dim = d;
    if (d == 2) {
        const int n = std::max(4, n_polar);
        const double w = 2.0 * M_PI / n;
        for (int i = 0; i < n; ++i) {
            const double th = (i + 0.5) * 2.0 * M_PI / n;
            rule.dirs.push_back({std::cos(th), std::sin(th), 0.0});
            rule.weights.push_back(w);
        }
    } else if (d == 3) {
        const int nt = std::max(4, n_polar);
        const int np = 2 * nt;
        std::vector<double> gx, gw;
        gauss_legendre(nt, gx, gw);
        const double wphi = 2.0 * M_PI / np;
        for (int i = 0; i < nt; ++i) {
            const double ct = gx[i];
            const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
            for (int j = 0; j < np; ++j) {
                const double ph = (j + 0.5) * 2.0 * M_PI / np;
                rule.dirs.push_back({st * std::cos(ph), st * std::sin(ph), ct});
                rule.weights.push_back(gw[i] * wphi);
            }
        }
    } else {
        throw std::invalid_argument("sphere_rule: only d = 2 and d = 3 supported");
    }
    return rule;
}

/// Surface area of the unit sphere S^{d-1} in R^d.
inline double sphere_area(int d) {
    return 2.0 * std::pow(M_PI, 0.5 * d) / std::tgamma(0.5 * d);
}

/// Volume of the unit ball in R^d.
inline double ball_volume(int d) { return sphere_area(d) / d; }

}  // namespace stablepert::quad
