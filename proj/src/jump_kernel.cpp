#include "stablepert/jump_kernel.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "stablepert/quadrature.hpp"
#include "stablepert/special.hpp"

namespace stablepert::jump {

namespace {
double beta_alpha_ratio(const StableParams& p) {
    return special::normalizing_constant(p.d, p.beta) /
           special::normalizing_constant(p.d, p.alpha);
}
}  // namespace

PerturbationB PerturbationB::zero(const StableParams& p) {
    PerturbationB b(p, Form::Zero);
    b.sup_norm_ = 0.0;
    b.mod_ratio_ = beta_alpha_ratio(p);
    return b;
}

PerturbationB PerturbationB::constant(const StableParams& p, double a) {
    if (a < 0.0) {
        // Negative constants violate admissibility at long range, where
        // |z|^{beta-alpha} falls below |a|.
        throw std::invalid_argument("PerturbationB: constant form requires a >= 0");
    }
    PerturbationB b(p, Form::Const);
    b.a_ = a;
    b.sup_norm_ = a;
    b.mod_ratio_ = beta_alpha_ratio(p);
    return b;
}

PerturbationB PerturbationB::truncated_stable(const StableParams& p) {
    PerturbationB b(p, Form::TruncatedStable);
    b.trunc_coeff_ = special::normalizing_constant(p.d, p.alpha) /
                     special::normalizing_constant(p.d, p.beta);
    // |z|^{beta-alpha} is decreasing, so the sup over |z| >= 1 sits at 1.
    b.sup_norm_ = b.trunc_coeff_;
    b.mod_ratio_ = 1.0 / b.trunc_coeff_;
    return b;
}

PerturbationB PerturbationB::callback(const StableParams& p,
                                      std::function<double(const Vec&, const Vec&)> eval,
                                      double sup_norm, std::uint64_t check_seed,
                                      double check_scale) {
    PerturbationB b(p, Form::Callback);
    b.eval_ = std::move(eval);
    b.sup_norm_ = sup_norm;
    b.mod_ratio_ = beta_alpha_ratio(p);
    const double ratio = special::normalizing_constant(p.d, p.alpha) /
                         special::normalizing_constant(p.d, p.beta);
    Rng rng(check_seed, 0);
    for (int i = 0; i < 1000; ++i) {
        Vec x = rng.sphere_direction(p.d) * (check_scale * rng.uniform() * 4.0);
        const double zlen = check_scale * std::pow(10.0, -3.0 + 6.0 * rng.uniform());
        Vec z = rng.sphere_direction(p.d) * zlen;
        const double v = b.eval_(x, z);
        Vec mz = z * -1.0;
        if (std::fabs(v - b.eval_(x, mz)) > 1e-12 * (1.0 + std::fabs(v)))
            throw std::invalid_argument("PerturbationB: callback is not even in z");
        if (std::fabs(v) > sup_norm * (1.0 + 1e-12))
            throw std::invalid_argument("PerturbationB: callback exceeds declared sup norm");
        if (v < -ratio * std::pow(zlen, p.beta - p.alpha) * (1.0 + 1e-12))
            throw std::invalid_argument("PerturbationB: callback violates admissibility");
    }
    return b;
}

double PerturbationB::operator()(const Vec& x, const Vec& z) const {
    switch (form_) {
        case Form::Zero:
            return 0.0;
        case Form::Const:
            return a_;
        case Form::TruncatedStable: {
            const double r = z.norm();
            if (r < 1.0) return 0.0;
            return -trunc_coeff_ * std::pow(r, params_.beta - params_.alpha);
        }
        case Form::Callback:
            return eval_(x, z);
    }
    return 0.0;
}

double PerturbationB::kernel_modulation(const Vec& x, const Vec& z, double z_norm) const {
    switch (form_) {
        case Form::Zero:
            return 0.0;
        case Form::Const:
            return mod_ratio_ * a_ * std::pow(z_norm, params_.alpha - params_.beta);
        case Form::TruncatedStable:
            return z_norm < 1.0 ? 0.0 : -1.0;
        case Form::Callback:
            return mod_ratio_ * eval_(x, z) * std::pow(z_norm, params_.alpha - params_.beta);
    }
    return 0.0;
}

double eps_A(const StableParams& p, double A) {
    if (A < 0.0) throw std::domain_error("eps_A: A must be nonnegative");
    if (A == 0.0) return std::numeric_limits<double>::infinity();
    const double ratio = special::normalizing_constant(p.d, p.alpha) /
                         special::normalizing_constant(p.d, p.beta);
    return std::pow(ratio / (2.0 * A), 1.0 / (p.alpha - p.beta));
}

double j_b(const StableParams& p, const PerturbationB& b, const Vec& x, const Vec& y) {
    const Vec z = y - x;
    const double r = z.norm();
    if (r == 0.0) throw std::domain_error("j_b: x and y must differ");
    const double ka = special::normalizing_constant(p.d, p.alpha);
    const double v =
        ka * std::pow(r, -(p.d + p.alpha)) * (1.0 + b.kernel_modulation(x, z, r));
    // Admissible b keeps this nonnegative; clamp the roundoff fringe.
    return std::max(0.0, v);
}

double dominating_kernel(const StableParams& p, double A, double z_norm) {
    if (!(z_norm > 0.0)) throw std::domain_error("dominating_kernel: |z| must be positive");
    const double ka = special::normalizing_constant(p.d, p.alpha);
    const double kb = special::normalizing_constant(p.d, p.beta);
    return ka * std::pow(z_norm, -(p.d + p.alpha)) +
           A * kb * std::pow(z_norm, -(p.d + p.beta));
}

double dominating_tail_mass(const StableParams& p, double A, double delta) {
    if (!(delta > 0.0)) throw std::domain_error("dominating_tail_mass: delta must be positive");
    const double ka = special::normalizing_constant(p.d, p.alpha);
    const double kb = special::normalizing_constant(p.d, p.beta);
    return quad::sphere_area(p.d) * (ka * std::pow(delta, -p.alpha) / p.alpha +
                                     A * kb * std::pow(delta, -p.beta) / p.beta);
}

Vec sample_dominating_jump(const StableParams& p, double A, double delta, Rng& rng) {
    const double ka = special::normalizing_constant(p.d, p.alpha);
    const double kb = special::normalizing_constant(p.d, p.beta);
    const double mass_a = ka * std::pow(delta, -p.alpha) / p.alpha;
    const double mass_b = A * kb * std::pow(delta, -p.beta) / p.beta;
    const double u_pick = rng.uniform();
    const double u_rad = rng.uniform_pos();
    double r;
    if (u_pick * (mass_a + mass_b) < mass_a) {
        r = delta * std::pow(u_rad, -1.0 / p.alpha);
    } else {
        r = delta * std::pow(u_rad, -1.0 / p.beta);
    }
    return rng.sphere_direction(p.d) * r;
}

}  // namespace stablepert::jump
