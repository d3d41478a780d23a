#include "stablepert/duhamel.hpp"

#include <algorithm>
#include <cmath>

#include "stablepert/errors.hpp"
#include "stablepert/parallel.hpp"
#include "stablepert/quadrature.hpp"
#include "stablepert/rng.hpp"

namespace stablepert::duhamel {

SeriesEngine::SeriesEngine(const StableParams& p, const jump::PerturbationB& b,
                           const geom::Ball& ball, SeriesOptions opts)
    : params_(p), b_(b), ball_(ball), opts_(opts), green_(p, ball) {}

double SeriesEngine::kernel(const Vec& z, const Vec& y) const {
    return nonlocal::apply_Sb_to_green_ball(params_, b_, ball_, green_, z, y, opts_.k_opts)
        .value;
}

void SeriesEngine::build_grid() {
    if (grid_built_) return;
    const int d = params_.d;
    std::vector<double> gx, gw;
    quad::gauss_legendre(opts_.grid_radial, gx, gw);
    // Slight rotation offset keeps grid nodes off probe points and axes.
    const double off = 0.2347;
    const auto rule = quad::sphere_rule(d, opts_.grid_angular);
    for (int i = 0; i < opts_.grid_radial; ++i) {
        const double s = 0.5 * (gx[i] + 1.0) * ball_.radius;
        const double ws = 0.5 * ball_.radius * gw[i] * std::pow(s, d - 1.0);
        for (std::size_t k = 0; k < rule.dirs.size(); ++k) {
            Vec u(d);
            if (d == 2) {
                const double th = std::atan2(rule.dirs[k][1], rule.dirs[k][0]) + off;
                u[0] = std::cos(th);
                u[1] = std::sin(th);
            } else {
                for (int c = 0; c < d; ++c) u[c] = rule.dirs[k][c];
            }
            nodes_.push_back(ball_.center + u * s);
            weights_.push_back(ws * rule.weights[k]);
        }
    }
    grid_built_ = true;
}

void SeriesEngine::build_matrix() {
    if (matrix_built_) return;
    build_grid();
    const std::size_t n = nodes_.size();
    smat_.assign(n * n, 0.0);
    parallel_for(n, opts_.threads, [&](std::size_t j) {
        for (std::size_t l = 0; l < n; ++l) {
            if (l == j) continue;  // diagonal cell omitted (integrable)
            smat_[j * n + l] = kernel(nodes_[j], nodes_[l]);
        }
    });
    matrix_built_ = true;
}

void SeriesEngine::prepare(int max_terms) {
    if (b_.form() == jump::PerturbationB::Form::Zero) return;
    build_grid();
    if (max_terms >= 2) build_matrix();
}

const std::vector<Vec>& SeriesEngine::grid_nodes() {
    build_grid();
    return nodes_;
}

const std::vector<double>& SeriesEngine::grid_weights() {
    build_grid();
    return weights_;
}

double SeriesEngine::g1(const Vec& x, const Vec& y) {
    auto f = [&](const Vec& z) { return green_(x, z) * kernel(z, y); };
    std::vector<nonlocal::SingularPoint> sing{{x, params_.alpha},
                                              {y, params_.alpha - params_.beta}};
    return nonlocal::integrate_ball_singular(ball_, f, sing, opts_.g1_angular,
                                             opts_.g1_rel_tol);
}

ProbeSeries SeriesEngine::run_probe(const Vec& x, const Vec& y, int max_terms) {
    if (max_terms < 0) max_terms = opts_.max_terms;
    ProbeSeries ps;
    ps.x = x;
    ps.y = y;
    ps.g0 = green_(x, y);
    ps.sum = ps.g0;
    if (b_.form() == jump::PerturbationB::Form::Zero || max_terms == 0) return ps;

    const double term1 = g1(x, y);
    ps.terms.push_back(term1);
    ps.sum += term1;

    double noise_floor = opts_.term_tol * ps.g0;
    if (max_terms >= 2 && std::fabs(term1) > noise_floor) {
        build_matrix();
        const std::size_t n = nodes_.size();
        std::vector<double> m(n), vgx(n);
        for (std::size_t l = 0; l < n; ++l) {
            m[l] = kernel(nodes_[l], y);
            vgx[l] = green_(x, nodes_[l]);
        }
        // The same first term through the grid rule gauges the grid
        // noise; term ratios below that level are meaningless.
        {
            double g1_grid = 0.0;
            for (std::size_t l = 0; l < n; ++l) g1_grid += weights_[l] * vgx[l] * m[l];
            noise_floor = std::max(noise_floor, 1.5 * std::fabs(g1_grid - term1));
        }
        for (int order = 2; order <= max_terms; ++order) {
            // m <- (S o W) m
            std::vector<double> m2(n, 0.0);
            for (std::size_t j = 0; j < n; ++j) {
                double acc = 0.0;
                const double* row = &smat_[j * n];
                for (std::size_t k = 0; k < n; ++k) acc += row[k] * weights_[k] * m[k];
                m2[j] = acc;
            }
            double gn = 0.0;
            for (std::size_t l = 0; l < n; ++l) gn += weights_[l] * vgx[l] * m2[l];
            m.swap(m2);
            if (std::fabs(gn) < noise_floor && order > 2) break;
            ps.terms.push_back(gn);
            ps.sum += gn;
            if (std::fabs(gn) < std::max(noise_floor, opts_.term_tol * ps.g0)) break;
        }
    }

    for (std::size_t i = 0; i + 1 < ps.terms.size(); ++i) {
        if (std::fabs(ps.terms[i]) > noise_floor &&
            std::fabs(ps.terms[i + 1]) > 0.3 * noise_floor)
            ps.max_ratio = std::max(ps.max_ratio,
                                    std::fabs(ps.terms[i + 1]) / std::fabs(ps.terms[i]));
    }
    if (!ps.terms.empty()) {
        const double last = std::fabs(ps.terms.back());
        const double q = std::min(ps.max_ratio > 0.0 ? ps.max_ratio : 0.5, 0.95);
        ps.tail_bound = std::max(last, noise_floor) * q / (1.0 - q);
    }
    return ps;
}

std::vector<double> SeriesEngine::series_on_grid(const Vec& x, int n_terms) {
    build_matrix();
    const std::size_t n = nodes_.size();
    std::vector<double> vgx(n);
    for (std::size_t l = 0; l < n; ++l) vgx[l] = green_(x, nodes_[l]);
    // G^b(x, z_l) = G_B(x, z_l) + sum_{k>=1} (v_gx o w)^T M_{k-1}[:, l],
    // M_0 = S, M_k = (S o W) M_{k-1}.
    std::vector<double> out(vgx);
    if (b_.form() == jump::PerturbationB::Form::Zero || n_terms == 0) return out;
    std::vector<double> M(smat_);
    for (int k = 1; k <= n_terms; ++k) {
        for (std::size_t l = 0; l < n; ++l) {
            double acc = 0.0;
            for (std::size_t j = 0; j < n; ++j) acc += weights_[j] * vgx[j] * M[j * n + l];
            out[l] += acc;
        }
        if (k == n_terms) break;
        std::vector<double> M2(n * n, 0.0);
        parallel_for(n, opts_.threads, [&](std::size_t j) {
            for (std::size_t l = 0; l < n; ++l) {
                double acc = 0.0;
                const double* row = &smat_[j * n];
                for (std::size_t i = 0; i < n; ++i)
                    acc += row[i] * weights_[i] * M[i * n + l];
                M2[j * n + l] = acc;
            }
        });
        M.swap(M2);
    }
    return out;
}

double SeriesEngine::fit_c1(int n_pairs, std::uint64_t seed) {
    // Best two-sided comparability constant after optimal rescaling of
    // the profile: c1 = sqrt(sup(G/g) * sup(g/G)).
    Rng rng(seed, 1);
    const geom::Domain dom(ball_);
    double hi = 0.0, lo = std::numeric_limits<double>::infinity();
    int done = 0;
    while (done < n_pairs) {
        Vec x = ball_.center + rng.sphere_direction(params_.d) *
                                   (ball_.radius * std::pow(rng.uniform(), 1.0 / params_.d));
        Vec y = ball_.center + rng.sphere_direction(params_.d) *
                                   (ball_.radius * std::pow(rng.uniform(), 1.0 / params_.d));
        if (dist(x, y) < 1e-9 * ball_.radius) continue;
        ++done;
        const double g = green_(x, y);
        const double prof = geom::profile_gd(dom, params_, x, y).value();
        if (g <= 0.0 || prof <= 0.0) continue;
        hi = std::max(hi, g / prof);
        lo = std::min(lo, g / prof);
    }
    if (!(hi > 0.0) || !std::isfinite(lo) || lo <= 0.0) return 1.0;
    return std::max(1.0, std::sqrt(hi / lo));
}

SeriesResult sum_series(const StableParams& p, const jump::PerturbationB& b,
                        const geom::Ball& ball, const std::vector<std::pair<Vec, Vec>>& probes,
                        const SeriesOptions& opts) {
    SeriesEngine engine(p, b, ball, opts);
    engine.prepare(opts.max_terms);

    SeriesResult res;
    res.probes.resize(probes.size());
    parallel_for(probes.size(), opts.threads, [&](std::size_t i) {
        res.probes[i] = engine.run_probe(probes[i].first, probes[i].second);
    });

    auto& cert = res.cert;
    cert.c1_hat = engine.fit_c1();
    for (const auto& ps : res.probes) {
        cert.delta_hat = std::max(cert.delta_hat, ps.max_ratio);
        if (ps.g0 > 0.0) {
            if (!ps.terms.empty())
                cert.delta_hat = std::max(cert.delta_hat, std::fabs(ps.terms[0]) / ps.g0);
            cert.tail_bound_rel = std::max(cert.tail_bound_rel, ps.tail_bound / ps.g0);
        }
        cert.n_terms = std::max(cert.n_terms, static_cast<int>(ps.terms.size()));
    }
    cert.contracting = cert.delta_hat < 1.0;
    if (!cert.contracting)
        throw contraction_error("sum_series: no contraction at this radius", cert.delta_hat);
    return res;
}

std::vector<std::pair<Vec, Vec>> stratified_probes(const geom::Ball& ball, int n,
                                                   std::uint64_t seed) {
    Rng rng(seed, 2);
    const int d = ball.center.dim();
    const double R = ball.radius;
    std::vector<std::pair<Vec, Vec>> out;
    auto clamp_inside = [&](Vec v) {
        const double r = dist(v, ball.center);
        if (r > 0.985 * R) v = ball.center + (v - ball.center) * (0.985 * R / r);
        return v;
    };
    for (int i = 0; i < n; ++i) {
        Vec x(d), y(d);
        switch (i % 4) {
            case 0:  // deep pair, near diagonal
                x = ball.center + rng.sphere_direction(d) * (0.3 * R * rng.uniform());
                y = x + rng.sphere_direction(d) * (0.12 * R * (0.5 + rng.uniform()));
                break;
            case 1:  // mid-range separation
                x = ball.center + rng.sphere_direction(d) * (0.5 * R * rng.uniform());
                y = x + rng.sphere_direction(d) * (0.8 * R);
                break;
            case 2:  // x near the boundary
                x = ball.center + rng.sphere_direction(d) * ((0.88 + 0.08 * rng.uniform()) * R);
                y = ball.center + rng.sphere_direction(d) * (0.4 * R * rng.uniform());
                break;
            default:  // both near the boundary, opposite-ish sides
                x = ball.center + rng.sphere_direction(d) * (0.9 * R);
                y = ball.center + rng.sphere_direction(d) * (0.9 * R);
                break;
        }
        x = clamp_inside(x);
        y = clamp_inside(y);
        if (dist(x, y) < 0.02 * R) y = clamp_inside(y + rng.sphere_direction(d) * (0.05 * R));
        out.emplace_back(x, y);
    }
    return out;
}

R1Result find_r1(const StableParams& p, double A, double r_hi, const SeriesOptions& opts) {
    if (A < 0.0) throw std::domain_error("find_r1: A must be nonnegative");
    if (!(r_hi > 0.0)) throw std::domain_error("find_r1: r_hi must be positive");
    R1Result res;
    if (A == 0.0) {
        // The series vanishes beyond the zeroth term.
        res.r1 = r_hi;
        res.c1_hat = 1.0;
        res.delta_at_r1 = 0.0;
        res.threshold = 1.0;
        return res;
    }
    const auto bA = jump::PerturbationB::constant(p, A);

    // The ratio fit only needs ~percent accuracy; coarse quadrature
    // settings keep the 12-step search cheap.
    SeriesOptions coarse = opts;
    coarse.k_opts.angular_nodes = 8;
    coarse.k_opts.rel_tol = 1e-3;
    coarse.g1_angular = 24;
    coarse.g1_rel_tol = 1e-3;

    auto delta_fit = [&](double r) {
        geom::Ball ball{Vec(p.d), r};
        SeriesOptions o = coarse;
        o.max_terms = 1;
        SeriesEngine engine(p, bA, ball, o);
        const auto probes = stratified_probes(ball, 3, 17);
        double dmax = 0.0;
        for (const auto& [x, y] : probes) {
            const auto ps = engine.run_probe(x, y, 1);
            if (ps.g0 > 0.0 && !ps.terms.empty())
                dmax = std::max(dmax, std::fabs(ps.terms[0]) / ps.g0);
        }
        return dmax;
    };

    {
        geom::Ball ball{Vec(p.d), r_hi};
        SeriesEngine engine(p, bA, ball, opts);
        res.c1_hat = engine.fit_c1();
    }
    res.threshold = 1.0 / (2.0 * res.c1_hat * res.c1_hat + 1.0);

    double hi = r_hi;
    const double delta_hi = delta_fit(hi);
    if (delta_hi <= res.threshold) {
        res.r1 = hi;
        res.delta_at_r1 = delta_hi;
        return res;
    }
    double lo = 0.0;
    double delta_lo = 0.0;
    for (int it = 0; it < 12; ++it) {
        const double mid = lo > 0.0 ? 0.5 * (lo + hi) : hi / 2.0;
        const double dm = delta_fit(mid);
        if (dm <= res.threshold) {
            lo = mid;
            delta_lo = dm;
        } else {
            hi = mid;
        }
    }
    if (lo == 0.0)
        throw contraction_error("find_r1: no contraction down to r_hi * 2^-12", delta_lo);
    res.r1 = lo;
    res.delta_at_r1 = delta_lo;
    return res;
}

}  // namespace stablepert::duhamel
