#pragma once

#include <atomic>
#include <functional>
#include <optional>

#include "stablepert/exact_ball.hpp"
#include "stablepert/geometry.hpp"
#include "stablepert/jump_kernel.hpp"
#include "stablepert/stable_params.hpp"
#include "stablepert/vec.hpp"

namespace stablepert::nonlocal {

/// A scalar field the operator can be applied to.  The optional
/// metadata steers the quadrature: support_radius truncates the outer
/// integral analytically, frequency sizes oscillation blocks and
/// angular rules, gradient enables the gradient-compensated
/// regularization.
struct ScalarField {
    std::function<double(const Vec&)> value;
    std::function<Vec(const Vec&)> gradient;  // may be empty
    std::optional<double> support_radius;     // f = 0 outside |p| > R
    double frequency = 0.0;                   // max spatial frequency
    double scale = 1.0;                       // magnitude hint for tolerances
};

ScalarField cosine_field(const Vec& xi);
ScalarField constant_field(int d, double c);
/// exp(-|x-c|^2 / (2 w^2)), numerically supported within ~9w.
ScalarField gaussian_field(const Vec& center, double width);

enum class PvMode { Symmetrized, GradientCompensated };

struct SbOptions {
    double abs_tol = 1e-8;  // scaled by field.scale
    PvMode mode = PvMode::Symmetrized;
    double split_radius = 1.0;
    int angular_nodes = 48;
    int max_blocks = 20000;
    const std::atomic<bool>* cancel = nullptr;
};

struct SbResult {
    double value = 0.0;
    double error = 0.0;
};

/// Principal value of the perturbation operator
///   S^b f(x) = A(d,-beta) pv int (f(x+z) - f(x)) b(x,z) |z|^{-d-beta} dz.
/// Since b(x, .) is even, the symmetrized regularization
///   (1/2)(f(x+z) + f(x-z) - 2 f(x)) replaces the limit exactly.
/// Throws numerical_error when the tail blocks fail to settle.
SbResult apply_Sb(const StableParams& p, const jump::PerturbationB& b, const ScalarField& f,
                  const Vec& x, const SbOptions& opt = {});

struct SbGreenOptions {
    int angular_nodes = 32;
    double rel_tol = 1e-6;
    const std::atomic<bool>* cancel = nullptr;
};

/// S^b_x G_B(x, y) for the ball Green function, extended by zero
/// outside the ball.  The integral splits at (delta_B(x) ^ |x-y|)/2;
/// the Green singularity at y is carved out and integrated in polar
/// coordinates with the |w-y|^{alpha-d} local power removed by
/// substitution.
SbResult apply_Sb_to_green_ball(const StableParams& p, const jump::PerturbationB& b,
                                const geom::Ball& ball, const ball::FastBallGreen& green,
                                const Vec& x, const Vec& y, const SbGreenOptions& opt = {});

/// Convenience overload constructing the fast Green evaluator.
SbResult apply_Sb_to_green_ball(const StableParams& p, const jump::PerturbationB& b,
                                const geom::Ball& ball, const Vec& x, const Vec& y,
                                const SbGreenOptions& opt = {});

/// Integrates f over the ball where f has isolated power-law
/// singularities: f ~ |w - p_i|^{exponent_i - d} near p_i.  Each
/// singular point is carved out and integrated in polar coordinates
/// with the power removed analytically; the remainder uses a product
/// rule centered at the ball.
struct SingularPoint {
    Vec point;
    double exponent;  // in (0, d]
};

double integrate_ball_singular(const geom::Ball& ball,
                               const std::function<double(const Vec&)>& f,
                               const std::vector<SingularPoint>& sing, int angular_nodes = 64,
                               double rel_tol = 1e-6);

}  // namespace stablepert::nonlocal
