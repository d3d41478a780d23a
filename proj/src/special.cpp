#include "stablepert/special.hpp"

#include <cmath>
#include <stdexcept>

#include "stablepert/errors.hpp"
#include "stablepert/quadrature.hpp"

namespace stablepert::special {

namespace {

constexpr double kTailSwitchRatio = 50.0;

double bessel_j(double nu, double x) {
    if (x < 0.0) throw std::invalid_argument("bessel_j: negative argument");
    if (nu == 0.5) {
        // Avoids the generic series for the d = 3 kernel.
        if (x == 0.0) return 0.0;
        return std::sqrt(2.0 / (M_PI * x)) * std::sin(x);
    }
    return std::cyl_bessel_j(nu, x);
}

/// Coefficient of the k-th term of the large-distance expansion
///   p(t,r) = sum_k (-1)^{k+1} (t^k / k!) c_k r^{-d-k alpha},
/// c_k = 2^{k alpha} pi^{-d/2} Gamma((d + k alpha)/2) * (k alpha / 2) / Gamma(1 - k alpha/2)
/// written through 1/Gamma so the pole at k alpha = 2 gives a clean zero.
double tail_coefficient(int d, double alpha, int k) {
    const double g = k * alpha;
    const double inv_gamma = (0.5 * g) / std::tgamma(1.0 - 0.5 * g);
    return std::pow(2.0, g) * std::pow(M_PI, -0.5 * d) * std::tgamma(0.5 * (d + g)) * inv_gamma;
}

double density_tail(const StableParams& p, double t, double r) {
    double sum = 0.0;
    double tk = 1.0;
    double sign = 1.0;
    for (int k = 1; k <= 3; ++k) {
        tk *= t / k;
        sum += sign * tk * tail_coefficient(p.d, p.alpha, k) *
               std::pow(r, -(p.d + k * p.alpha));
        sign = -sign;
    }
    return sum;
}

double density_at_origin(const StableParams& p, double t) {
    const double area = quad::sphere_area(p.d);
    return area * std::pow(2.0 * M_PI, -p.d) * std::tgamma(p.d / p.alpha) /
           (p.alpha * std::pow(t, p.d / p.alpha));
}

/// Hankel inversion p(t,r) = (2 pi)^{-d/2} r^{1-d/2}
///   int_0^inf exp(-t s^alpha) J_{d/2-1}(r s) s^{d/2} ds,
/// integrated in half-period blocks of the Bessel oscillation.
double density_hankel(const StableParams& p, double t, double r) {
    const double nu = 0.5 * p.d - 1.0;
    const double s_cut = std::pow(50.0 / t, 1.0 / p.alpha);
    const auto integrand = [&](double s) {
        return std::exp(-t * std::pow(s, p.alpha)) * bessel_j(nu, r * s) *
               std::pow(s, 0.5 * p.d);
    };
    const double pref = std::pow(2.0 * M_PI, -0.5 * p.d) * std::pow(r, 1.0 - 0.5 * p.d);

    double sum = 0.0;
    if (r * s_cut <= 8.0) {
        quad::Options opt;
        opt.abs_tol = 1e-280;
        opt.rel_tol = 1e-11;
        opt.max_intervals = 800;
        sum = quad::integrate(integrand, 0.0, s_cut, opt).value;
    } else {
        const double h = M_PI / r;
        const double abs_tol = 1e-12 * std::max(1.0, density_at_origin(p, t)) / pref;
        double s0 = 0.0;
        const int max_blocks = 200000;
        for (int k = 0; k < max_blocks; ++k) {
            const double s1 = std::min(s0 + h, s_cut);
            sum += quad::detail::gk15(integrand, s0, s1).value;
            s0 = s1;
            if (s0 >= s_cut) break;
            if (k >= 3) {
                // Envelope bound on the remaining tail.
                const double env = std::exp(-t * std::pow(s0, p.alpha)) *
                                   std::sqrt(2.0 / (M_PI * r * s0)) * std::pow(s0, 0.5 * p.d);
                const double decay_len = std::max(h, s0 / (p.alpha * t * std::pow(s0, p.alpha)));
                if (env * decay_len * 2.0 < abs_tol) break;
            }
        }
    }
    return pref * sum;
}

}  // namespace

double normalizing_constant(int d, double sigma) {
    if (d < 1) throw std::domain_error("normalizing_constant: dimension must be >= 1");
    if (!(sigma > 0.0 && sigma < 2.0))
        throw std::domain_error("normalizing_constant: index must lie in (0, 2)");
    return sigma * std::pow(2.0, sigma - 1.0) * std::pow(M_PI, -0.5 * d) *
           std::tgamma(0.5 * (d + sigma)) / std::tgamma(1.0 - 0.5 * sigma);
}

double stable_density_free(const StableParams& p, double t, double r) {
    if (!(t > 0.0)) throw std::domain_error("stable_density_free: t must be positive");
    if (r < 0.0) throw std::domain_error("stable_density_free: r must be nonnegative");
    if (r == 0.0) return density_at_origin(p, t);
    const double scale = std::pow(t, 1.0 / p.alpha);
    if (r / scale > kTailSwitchRatio) return density_tail(p, t, r);
    return density_hankel(p, t, r);
}

double profile_q(const StableParams& p, double t, double r) {
    if (!(t > 0.0)) throw std::domain_error("profile_q: t must be positive");
    const double diag = std::pow(t, -static_cast<double>(p.d) / p.alpha);
    if (r <= 0.0) return diag;
    return std::min(diag, t * std::pow(r, -(p.d + p.alpha)));
}

double profile_independent_sum(const StableParams& p, double a, double t, double r) {
    if (a < 0.0) throw std::domain_error("profile_independent_sum: a must be nonnegative");
    if (!(t > 0.0)) throw std::domain_error("profile_independent_sum: t must be positive");
    double diag = std::pow(t, -static_cast<double>(p.d) / p.alpha);
    if (a > 0.0) diag = std::min(diag, std::pow(a * t, -static_cast<double>(p.d) / p.beta));
    if (r <= 0.0) return diag;
    const double off =
        t * std::pow(r, -(p.d + p.alpha)) + a * t * std::pow(r, -(p.d + p.beta));
    return std::min(diag, off);
}

DensityTable::DensityTable(const StableParams& p, double t, double r_max, int n_points)
    : params_(p), t_(t) {
    p0_ = stable_density_free(p, t, 0.0);
    r_lo_ = 1e-4 * std::pow(t, 1.0 / p.alpha);
    r_hi_ = std::max(r_max, 2.0 * r_lo_);
    log_r_lo_ = std::log(r_lo_);
    dlog_ = (std::log(r_hi_) - log_r_lo_) / (n_points - 1);
    log_p_.resize(n_points);
    for (int i = 0; i < n_points; ++i) {
        const double r = std::exp(log_r_lo_ + i * dlog_);
        log_p_[i] = std::log(stable_density_free(p, t, r));
    }
}

double DensityTable::operator()(double r) const {
    if (r <= r_lo_) return p0_;
    if (r >= r_hi_) return stable_density_free(params_, t_, r);
    const double u = (std::log(r) - log_r_lo_) / dlog_;
    const int i = std::min(static_cast<int>(u), static_cast<int>(log_p_.size()) - 2);
    const double w = u - i;
    return std::exp((1.0 - w) * log_p_[i] + w * log_p_[i + 1]);
}

}  // namespace stablepert::special
