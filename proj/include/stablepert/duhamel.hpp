#pragma once

#include <vector>

#include "stablepert/exact_ball.hpp"
#include "stablepert/geometry.hpp"
#include "stablepert/jump_kernel.hpp"
#include "stablepert/nonlocal.hpp"
#include "stablepert/stable_params.hpp"

namespace stablepert::duhamel {

struct SeriesOptions {
    int max_terms = 6;
    /// Stop once the latest term is below this fraction of G_B at every probe.
    double term_tol = 1e-3;
    /// Quadrature grid for terms of order >= 2.
    int grid_radial = 10;
    int grid_angular = 22;
    /// Angular nodes of the dedicated first-term quadrature.
    int g1_angular = 48;
    double g1_rel_tol = 1e-5;
    /// Settings of the inner S^b G_B evaluations (accuracy/cost knob).
    nonlocal::SbGreenOptions k_opts = {20, 1e-4, nullptr};
    int threads = 0;
};

struct ProbeSeries {
    Vec x, y;
    double g0 = 0.0;                  // G_B(x, y)
    std::vector<double> terms;        // G_1, G_2, ...
    double sum = 0.0;                 // G_B + sum of computed terms
    double tail_bound = 0.0;          // geometric bound on the dropped tail
    double max_ratio = 0.0;           // max |G_{n+1}| / |G_n| observed
};

struct SeriesCertificate {
    double delta_hat = 0.0;     // fitted contraction factor over probes
    double c1_hat = 1.0;        // Green/profile comparability constant
    int n_terms = 0;
    double tail_bound_rel = 0.0;
    bool contracting = false;
};

struct SeriesResult {
    std::vector<ProbeSeries> probes;
    SeriesCertificate cert;
};

/// Shared machinery of the perturbation series
///   G_0 = G_B,  G_n(x,y) = int_B G_{n-1}(x,z) S^b_z G_B(z,y) dz.
/// The first term is evaluated by a singularity-carved ball quadrature;
/// higher terms iterate a quadrature-grid kernel matrix that is built
/// once per (b, ball).
class SeriesEngine {
  public:
    SeriesEngine(const StableParams& p, const jump::PerturbationB& b, const geom::Ball& ball,
                 SeriesOptions opts = {});

    /// Builds grid and kernel matrix up front; call before evaluating
    /// probes from multiple threads.
    void prepare(int max_terms);

    /// Runs the series at one probe pair up to the stopping rule.
    ProbeSeries run_probe(const Vec& x, const Vec& y, int max_terms = -1);

    /// Green function values of the partial series on the internal grid
    /// for a fixed source x; used by the Duhamel fixed-point residual.
    std::vector<double> series_on_grid(const Vec& x, int n_terms);
    const std::vector<Vec>& grid_nodes();
    const std::vector<double>& grid_weights();

    /// S^b_z G_B(z, y) with the engine's settings.
    double kernel(const Vec& z, const Vec& y) const;

    double g1(const Vec& x, const Vec& y);
    const ball::FastBallGreen& green() const { return green_; }
    /// Fitted comparability constant between G_B and the Green profile.
    double fit_c1(int n_pairs = 256, std::uint64_t seed = 11);

  private:
    void build_grid();
    void build_matrix();

    StableParams params_;
    jump::PerturbationB b_;
    geom::Ball ball_;
    SeriesOptions opts_;
    ball::FastBallGreen green_;

    bool grid_built_ = false;
    std::vector<Vec> nodes_;
    std::vector<double> weights_;
    bool matrix_built_ = false;
    std::vector<double> smat_;  // S[j*n + l] = S^b_{z_j} G_B(z_j, z_l)
};

/// Sums the series at the probe pairs with a contraction certificate.
/// Throws contraction_error when the fitted term ratio reaches 1.
SeriesResult sum_series(const StableParams& p, const jump::PerturbationB& b,
                        const geom::Ball& ball, const std::vector<std::pair<Vec, Vec>>& probes,
                        const SeriesOptions& opts = {});

struct R1Result {
    double r1 = 0.0;
    double c1_hat = 1.0;
    double delta_at_r1 = 0.0;
    double threshold = 0.0;
};

/// Largest tested ball radius (by 12-step bisection on (0, r_hi]) at
/// which the first-term contraction factor, fitted with the worst-case
/// constant perturbation of sup norm A, stays below 1/(2 c1^2 + 1).
R1Result find_r1(const StableParams& p, double A, double r_hi, const SeriesOptions& opts = {});

/// Stratified probe pairs inside a ball: near-diagonal, mid-range and
/// near-boundary pairs, scaled to the ball.
std::vector<std::pair<Vec, Vec>> stratified_probes(const geom::Ball& ball, int n,
                                                   std::uint64_t seed = 5);

}  // namespace stablepert::duhamel
