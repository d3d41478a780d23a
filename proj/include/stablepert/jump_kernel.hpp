#pragma once

#include <functional>
#include <optional>

#include "stablepert/rng.hpp"
#include "stablepert/stable_params.hpp"
#include "stablepert/vec.hpp"

namespace stablepert::jump {

/// The perturbation function b(x, z).  Builtins: identically zero, a
/// constant, and the truncated-stable form
///   b(x,z) = -(A(d,-alpha)/A(d,-beta)) |z|^{beta-alpha} 1{|z| >= 1},
/// which removes all jumps of length >= 1 from the stable kernel.
/// User callbacks are admitted after randomized symmetry and
/// admissibility spot checks at construction.
class PerturbationB {
  public:
    enum class Form { Zero, Const, TruncatedStable, Callback };

    static PerturbationB zero(const StableParams& p);
    static PerturbationB constant(const StableParams& p, double a);
    static PerturbationB truncated_stable(const StableParams& p);
    static PerturbationB callback(const StableParams& p,
                                  std::function<double(const Vec&, const Vec&)> eval,
                                  double sup_norm, std::uint64_t check_seed = 7,
                                  double check_scale = 1.0);

    double operator()(const Vec& x, const Vec& z) const;

    /// Relative modulation m(x,z) = (A(d,-beta)/A(d,-alpha)) b(x,z) |z|^{alpha-beta}
    /// so that j^b(x, x+z) = A(d,-alpha)|z|^{-d-alpha} (1 + m(x,z)).
    /// Exact -1 on the removed range of the truncated-stable form.
    double kernel_modulation(const Vec& x, const Vec& z, double z_norm) const;

    Form form() const { return form_; }
    /// Sup norm ||b||_inf (the constant A of the admissible family).
    double sup_norm() const { return sup_norm_; }
    double const_value() const { return a_; }

    /// Uniform ellipticity constant eps of j^b >= eps |z|^{-d-alpha},
    /// when the model asserts it.
    std::optional<double> elliptic_eps() const { return elliptic_eps_; }
    void set_elliptic_eps(double eps) { elliptic_eps_ = eps; }

  private:
    PerturbationB(const StableParams& p, Form f) : params_(p), form_(f) {}

    StableParams params_;
    Form form_;
    double a_ = 0.0;
    double trunc_coeff_ = 0.0;  // A(d,-alpha)/A(d,-beta)
    double mod_ratio_ = 0.0;    // A(d,-beta)/A(d,-alpha)
    std::function<double(const Vec&, const Vec&)> eval_;
    double sup_norm_ = 0.0;
    std::optional<double> elliptic_eps_;
};

/// Jump-length threshold below which the perturbed kernel dominates
/// half of the stable one:
///   eps(A) = ((1/2A) A(d,-alpha)/A(d,-beta))^{1/(alpha-beta)}.
/// Returns +infinity for A = 0.
double eps_A(const StableParams& p, double A);

/// State-dependent jump intensity
///   j^b(x,y) = A(d,-alpha)|y-x|^{-d-alpha} (1 + (A(d,-beta)/A(d,-alpha)) b(x,y-x)|y-x|^{alpha-beta}).
double j_b(const StableParams& p, const PerturbationB& b, const Vec& x, const Vec& y);

/// State-independent dominating kernel
///   j_dom(r) = A(d,-alpha) r^{-d-alpha} + A A(d,-beta) r^{-d-beta},
/// a pointwise upper bound of j^b(x, x+z) over all admissible b with
/// ||b||_inf <= A.
double dominating_kernel(const StableParams& p, double A, double z_norm);

/// Total dominating intensity of jumps longer than delta:
///   Lambda(delta) = |S^{d-1}| (A(d,-alpha) delta^{-alpha}/alpha + A A(d,-beta) delta^{-beta}/beta).
double dominating_tail_mass(const StableParams& p, double A, double delta);

/// Draws a displacement with |z| > delta from the normalized dominating
/// kernel: a two-component radial Pareto mixture with an isotropic
/// direction.
Vec sample_dominating_jump(const StableParams& p, double A, double delta, Rng& rng);

}  // namespace stablepert::jump
