#pragma once

#include <memory>
#include <vector>

#include "stablepert/geometry.hpp"
#include "stablepert/stable_params.hpp"
#include "stablepert/vec.hpp"

namespace stablepert::ball {

/// Global Green function of the free stable process (d > alpha):
///   G(x,y) = 2^{-alpha} pi^{-d/2} Gamma((d-alpha)/2) Gamma(alpha/2)^{-1} |x-y|^{alpha-d}.
ExtReal green_global(const StableParams& p, const Vec& x, const Vec& y);

/// Prefactor of green_global (value at |x-y| = 1).
double green_global_constant(int d, double alpha);

/// Green function of the stable process killed on exiting a ball:
///   G_B(x,y) = c(d,alpha) I(z) |x-y|^{alpha-d},
///   z = (r^2-|x-x0|^2)(r^2-|y-x0|^2)/|x-y|^2,
///   I(z) = int_0^z (u+1)^{-d/2} u^{alpha/2-1} du.
/// The 1D integral is evaluated adaptively to 1e-10 relative.
ExtReal green_ball(const StableParams& p, const geom::Ball& b, const Vec& x, const Vec& y);

/// Exit density of the ball:
///   K_B(x,y) = c(d,alpha) (r^2-|x-x0|^2)^{alpha/2} (|y-x0|^2-r^2)^{-alpha/2} |x-y|^{-d},
///   c(d,alpha) = Gamma(d/2) sin(pi alpha/2) pi^{-d/2-1}.
double poisson_ball(const StableParams& p, const geom::Ball& b, const Vec& x, const Vec& y);

/// The incomplete integral I(z) above, exposed for direct checks.
double green_ball_integral(int d, double alpha, double z, double rel_tol = 1e-12);

namespace detail {
/// Interpolation table of I(z) on a log grid; depends on (d, alpha)
/// only and is shared process-wide.
struct GreenIntegralTable {
    double log_z_lo, dlog, z_lo, z_hi;
    std::vector<double> log_i;
    double i_total;  // I(infinity) = B(alpha/2, (d-alpha)/2)
    double alpha;
    double eval(double z) const;
};
std::shared_ptr<const GreenIntegralTable> green_integral_table(int d, double alpha);
}  // namespace detail

/// Table-accelerated evaluator of G_B used by the quadrature-heavy
/// series engine; interpolates I(z) to ~1e-8 relative.
class FastBallGreen {
  public:
    FastBallGreen(const StableParams& p, const geom::Ball& b);

    /// G_B(x, y) extended by zero outside the ball; finite positive
    /// inputs only (returns +inf at x == y).
    double operator()(const Vec& x, const Vec& y) const;

  private:
    StableParams params_;
    geom::Ball ball_;
    double prefactor_;
    std::shared_ptr<const detail::GreenIntegralTable> table_;
};

}  // namespace stablepert::ball
