#pragma once

#include <optional>
#include <vector>

#include "stablepert/stable_params.hpp"
#include "stablepert/vec.hpp"

namespace stablepert::geom {

struct Ball {
    Vec center;
    double radius;
};

/// Bounded region: a ball or a finite union of balls with pairwise
/// disjoint closures.  Exact boundary distance and closed-form kernels
/// are available on balls, which is why the geometry engine is
/// restricted to them; the profile functions below carry the general
/// boundary-decay structure.
class Domain {
  public:
    explicit Domain(Ball b);
    explicit Domain(std::vector<Ball> balls);

    int dim() const { return balls_[0].center.dim(); }
    bool is_single_ball() const { return balls_.size() == 1; }
    const Ball& ball() const;
    const std::vector<Ball>& components() const { return balls_; }

    bool contains(const Vec& x) const;
    /// Index of the component containing x, or -1.
    int component_of(const Vec& x) const;

    /// Distance to the boundary; positive iff x is inside.
    double delta(const Vec& x) const;

    /// Largest component radius (domain scale used for defaults).
    double scale() const;
    double diameter() const;

    /// Distance between two components' closures.
    double component_distance(int i, int j) const;

    /// Interior-ball localization constant: for every interior x and
    /// r <= scale(), inner_ball_witness returns A with
    /// B(A, theta0() * r) contained in D intersect B(x, r).
    static double theta0() { return 0.5; }
    Vec inner_ball_witness(const Vec& x, double r) const;

  private:
    std::vector<Ball> balls_;
};

/// delta_D(x) + delta_D(y) + |x - y|; the comparability scale that
/// appears throughout the boundary estimates.
double r_profile(const Domain& dom, const Vec& x, const Vec& y);

/// Heat-kernel profile
///   (1 ^ delta(x)^{a/2}/sqrt(t)) (1 ^ delta(y)^{a/2}/sqrt(t)) (t^{-d/a} ^ t/|x-y|^{d+a}).
double profile_fd(const Domain& dom, const StableParams& p, double t, const Vec& x, const Vec& y);

/// Green-function profile
///   |x-y|^{a-d} (1 ^ delta(x)/|x-y|)^{a/2} (1 ^ delta(y)/|x-y|)^{a/2}.
/// Infinite at x = y.
ExtReal profile_gd(const Domain& dom, const StableParams& p, const Vec& x, const Vec& y);

/// Bound profile for the perturbation operator applied to the Green
/// function; three regimes split on sign(alpha - 2 beta), with a
/// logarithmic factor in the critical case.  Infinite at x = y.
/// Note the profile is not symmetric in (x, y).
ExtReal profile_hd(const Domain& dom, const StableParams& p, const Vec& x, const Vec& y);

}  // namespace stablepert::geom
