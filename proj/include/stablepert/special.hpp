#pragma once

#include <vector>

#include "stablepert/stable_params.hpp"

namespace stablepert::special {

/// Normalizing constant A(d, -sigma) of the fractional Laplacian of
/// order sigma in dimension d:
///   A(d,-sigma) = sigma 2^{sigma-1} pi^{-d/2} Gamma((d+sigma)/2) / Gamma(1-sigma/2).
/// With this constant the operator with kernel A(d,-sigma)|z|^{-d-sigma}
/// has Fourier symbol -|xi|^sigma.
double normalizing_constant(int d, double sigma);

/// Transition density p(t, x, y) of the isotropic stable process with
/// symbol exp(-t |xi|^alpha), evaluated at |x - y| = r.  Exact Hankel
/// integral in the bulk; two-term power tail beyond r/t^{1/alpha} = 50.
double stable_density_free(const StableParams& p, double t, double r);

/// Interior two-sided profile t^{-d/alpha} min-wedge t r^{-d-alpha}.
double profile_q(const StableParams& p, double t, double r);

/// Two-sided profile of the independent sum of an alpha-stable process
/// and an a-scaled beta-stable process; degenerates to profile_q at a=0.
double profile_independent_sum(const StableParams& p, double a, double t, double r);

/// Fast repeated evaluation of the free density at fixed (params, t):
/// log-log interpolation table over a geometric r-grid, exact endpoints.
class DensityTable {
  public:
    DensityTable(const StableParams& p, double t, double r_max, int n_points = 600);
    double operator()(double r) const;

  private:
    StableParams params_;
    double t_;
    double r_lo_, r_hi_, log_r_lo_, dlog_;
    double p0_;  // density at r = 0
    std::vector<double> log_p_;
};

}  // namespace stablepert::special
