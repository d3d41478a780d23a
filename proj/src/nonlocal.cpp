#include "stablepert/nonlocal.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "stablepert/errors.hpp"
#include "stablepert/quadrature.hpp"
#include "stablepert/special.hpp"

namespace stablepert::nonlocal {

namespace {

using jump::PerturbationB;

Vec rule_dir(const quad::SphereRule& rule, std::size_t i, int d) {
    Vec u(d);
    for (int k = 0; k < d; ++k) u[k] = rule.dirs[i][k];
    return u;
}

/// Parameters s where the ray origin + s u crosses any of the given
/// spheres, clipped to [0, s_max] and sorted; integrating between
/// consecutive splits keeps each segment free of indicator kinks.
std::vector<double> ray_splits(const Vec& origin, const Vec& u, double s_max,
                               const std::vector<std::pair<Vec, double>>& spheres) {
    std::vector<double> s{0.0, s_max};
    for (const auto& [c, r] : spheres) {
        if (r <= 0.0) continue;
        const Vec oc = c - origin;
        const double proj = dot(oc, u);
        const double perp2 = oc.norm2() - proj * proj;
        const double disc = r * r - perp2;
        if (disc <= 0.0) continue;
        const double root = std::sqrt(disc);
        for (double cand : {proj - root, proj + root})
            if (cand > 0.0 && cand < s_max) s.push_back(cand);
    }
    std::sort(s.begin(), s.end());
    return s;
}

/// Angular average of b against the sphere rule:
/// S_b(rho) = int_{S^{d-1}} b(x, rho u) dsigma(u).
double angular_b(const StableParams& p, const PerturbationB& b, const Vec& x, double rho,
                 const quad::SphereRule& rule) {
    switch (b.form()) {
        case PerturbationB::Form::Zero:
            return 0.0;
        case PerturbationB::Form::Const:
            return b.const_value() * quad::sphere_area(p.d);
        case PerturbationB::Form::TruncatedStable: {
            Vec z(p.d);
            z[0] = rho;
            return b(x, z) * quad::sphere_area(p.d);
        }
        case PerturbationB::Form::Callback: {
            double s = 0.0;
            for (std::size_t i = 0; i < rule.dirs.size(); ++i)
                s += rule.weights[i] * b(x, rule_dir(rule, i, p.d) * rho);
            return s;
        }
    }
    return 0.0;
}

/// int_from^inf rho^{-1-beta} S_b(rho) drho, with closed forms for the
/// built-in perturbations.
double radial_b_tail(const StableParams& p, const PerturbationB& b, const Vec& x, double from,
                     const quad::SphereRule& rule) {
    const double area = quad::sphere_area(p.d);
    switch (b.form()) {
        case PerturbationB::Form::Zero:
            return 0.0;
        case PerturbationB::Form::Const:
            return b.const_value() * area * std::pow(from, -p.beta) / p.beta;
        case PerturbationB::Form::TruncatedStable: {
            const double m = std::max(from, 1.0);
            const double coeff = special::normalizing_constant(p.d, p.alpha) /
                                 special::normalizing_constant(p.d, p.beta);
            return -coeff * area * std::pow(m, -p.alpha) / p.alpha;
        }
        case PerturbationB::Form::Callback: {
            // tau = rho^{-beta} flattens the weight exactly.
            const double top = std::pow(from, -p.beta);
            auto f = [&](double tau) {
                const double rho = std::pow(tau, -1.0 / p.beta);
                return angular_b(p, b, x, rho, rule);
            };
            quad::Options o;
            o.abs_tol = 1e-14;
            o.rel_tol = 1e-9;
            o.max_intervals = 300;
            o.throw_on_failure = false;
            return quad::integrate(f, 0.0, top, o).value / p.beta;
        }
    }
    return 0.0;
}

quad::SphereRule make_rule(int d, int base_nodes, double rho, double frequency) {
    int n = base_nodes;
    if (frequency > 0.0) {
        n = std::max(n, static_cast<int>(std::ceil(3.0 * rho * frequency)) + 8);
    }
    return quad::sphere_rule(d, n);
}

}  // namespace

ScalarField cosine_field(const Vec& xi) {
    ScalarField f;
    f.value = [xi](const Vec& x) { return std::cos(dot(xi, x)); };
    f.gradient = [xi](const Vec& x) {
        Vec g = xi;
        g *= -std::sin(dot(xi, x));
        return g;
    };
    f.frequency = xi.norm();
    f.scale = 1.0;
    return f;
}

ScalarField constant_field(int d, double c) {
    ScalarField f;
    f.value = [c](const Vec&) { return c; };
    f.gradient = [d](const Vec&) { return Vec(d); };
    f.scale = std::max(1.0, std::fabs(c));
    return f;
}

ScalarField gaussian_field(const Vec& center, double width) {
    ScalarField f;
    const Vec c = center;
    const double w2 = width * width;
    f.value = [c, w2](const Vec& x) { return std::exp(-0.5 * (x - c).norm2() / w2); };
    f.gradient = [c, w2](const Vec& x) {
        Vec g = x - c;
        g *= -std::exp(-0.5 * (x - c).norm2() / w2) / w2;
        return g;
    };
    f.support_radius = center.norm() + 9.0 * width;
    f.frequency = 1.0 / width;
    f.scale = 1.0;
    return f;
}

SbResult apply_Sb(const StableParams& p, const PerturbationB& b, const ScalarField& f,
                  const Vec& x, const SbOptions& opt) {
    if (b.form() == PerturbationB::Form::Zero) return {0.0, 0.0};
    if (!f.value) throw std::invalid_argument("apply_Sb: field has no evaluator");
    const bool grad_mode = opt.mode == PvMode::GradientCompensated;
    if (grad_mode && !f.gradient)
        throw std::invalid_argument("apply_Sb: gradient-compensated mode needs a gradient");

    const double kb = special::normalizing_constant(p.d, p.beta);
    const double fx = f.value(x);
    const Vec gx = grad_mode ? f.gradient(x) : Vec(p.d);
    const double tol = opt.abs_tol * f.scale;

    auto base_rule = quad::sphere_rule(p.d, opt.angular_nodes);

    // Angular integral of the regularized difference at radius rho.
    auto w_of_rho = [&](double rho, const quad::SphereRule& rule, bool compensate) {
        double s = 0.0;
        for (std::size_t i = 0; i < rule.dirs.size(); ++i) {
            const Vec u = rule_dir(rule, i, p.d);
            const Vec z = u * rho;
            const double bv = b(x, z);
            if (bv == 0.0) continue;
            double diff;
            if (!grad_mode) {
                diff = 0.5 * (f.value(x + z) + f.value(x - z) - 2.0 * fx);
            } else {
                diff = f.value(x + z) - fx;
                if (compensate) diff -= rho * dot(gx, u);
            }
            s += rule.weights[i] * bv * diff;
        }
        return s;
    };

    double total = 0.0;
    double err = 0.0;

    // Inner zone (0, split]: rho = v^{1/(2-beta)} removes the
    // rho^{1-beta} small-jump weight against the O(rho^2) difference.
    {
        const double pw = 1.0 / (2.0 - p.beta);
        auto inner = [&](double v) {
            const double rho = std::pow(v, pw);
            return pw * std::pow(v, -pw * p.beta - 1.0) * w_of_rho(rho, base_rule, true);
        };
        quad::Options o;
        o.abs_tol = 0.25 * tol / kb;
        o.rel_tol = 1e-9;
        o.max_intervals = 400;
        o.throw_on_failure = false;
        o.cancel = opt.cancel;
        auto r = quad::integrate(inner, 0.0, std::pow(opt.split_radius, 2.0 - p.beta), o);
        total += r.value;
        err += r.error;
    }

    // Outer zone [split, rho_max): finite when the field has compact
    // support; otherwise oscillation blocks with tail averaging.
    const double split = opt.split_radius;
    if (f.support_radius) {
        const double rho_max = std::max(split, *f.support_radius + x.norm());
        auto outer = [&](double rho) {
            const auto rule = make_rule(p.d, opt.angular_nodes, rho, f.frequency);
            return std::pow(rho, -1.0 - p.beta) * w_of_rho(rho, rule, false);
        };
        quad::Options o;
        o.abs_tol = 0.25 * tol / kb;
        o.rel_tol = 1e-9;
        o.max_intervals = 600;
        o.throw_on_failure = false;
        o.cancel = opt.cancel;
        auto r = quad::integrate(outer, split, rho_max, o);
        total += r.value;
        err += r.error;
        // Beyond the support only the -f(x) part survives.
        total -= fx * radial_b_tail(p, b, x, rho_max, base_rule);
    } else {
        // Separate the non-decaying -f(x) part, integrable in closed or
        // 1D form, from the f(x +- z) part whose angular average decays.
        total -= fx * radial_b_tail(p, b, x, split, base_rule);
        auto f_part = [&](double rho, const quad::SphereRule& rule) {
            double s = 0.0;
            for (std::size_t i = 0; i < rule.dirs.size(); ++i) {
                const Vec u = rule_dir(rule, i, p.d);
                const Vec z = u * rho;
                const double bv = b(x, z);
                if (bv == 0.0) continue;
                const double vv = grad_mode ? f.value(x + z)
                                            : 0.5 * (f.value(x + z) + f.value(x - z));
                s += rule.weights[i] * bv * vv;
            }
            return std::pow(rho, -1.0 - p.beta) * s;
        };
        const double block = f.frequency > 0.0 ? M_PI / f.frequency : std::max(1.0, x.norm());
        double a = split;
        std::vector<double> partials;
        double sum = 0.0;
        bool settled = false;
        for (int k = 0; k < opt.max_blocks; ++k) {
            if (opt.cancel && opt.cancel->load(std::memory_order_relaxed))
                throw cancelled_error();
            const double bwidth = f.frequency > 0.0 ? block : block * std::pow(1.3, k);
            const double b2 = a + bwidth;
            const auto rule = make_rule(p.d, opt.angular_nodes, b2, f.frequency);
            const double contrib =
                quad::integrate([&](double rho) { return f_part(rho, rule); }, a, b2,
                                {1e-15, 1e-8, 60, nullptr, false})
                    .value;
            sum += contrib;
            partials.push_back(sum);
            a = b2;
            // Accelerated tail estimate: averaging for alternating
            // block signs, iterated Aitken for (asymptotically
            // geometric) one-signed tails.  The error gauge compares
            // two acceleration depths.
            if (partials.size() >= 8) {
                bool alternating = true;
                for (std::size_t i = partials.size() - 5; i + 1 < partials.size(); ++i) {
                    const double d1 = partials[i] - partials[i - 1];
                    const double d2 = partials[i + 1] - partials[i];
                    if (d1 * d2 > 0.0) alternating = false;
                }
                auto accelerate = [&](std::vector<double> row) {
                    if (alternating) {
                        while (row.size() > 1) {
                            for (std::size_t i = 0; i + 1 < row.size(); ++i)
                                row[i] = 0.5 * (row[i] + row[i + 1]);
                            row.pop_back();
                        }
                        return row[0];
                    }
                    while (row.size() >= 3) {
                        std::vector<double> next;
                        for (std::size_t i = 0; i + 2 < row.size(); ++i) {
                            const double d1 = row[i + 1] - row[i];
                            const double d2 = row[i + 2] - row[i + 1];
                            const double den = d2 - d1;
                            next.push_back(std::fabs(den) > 1e-300
                                               ? row[i + 2] - d2 * d2 / den
                                               : row[i + 2]);
                        }
                        row = std::move(next);
                    }
                    return row.back();
                };
                const double est_deep = accelerate({partials.end() - 8, partials.end()});
                const double est_shallow =
                    accelerate({partials.end() - 7, partials.end() - 1});
                const double est_err =
                    std::fabs(est_deep - est_shallow) + std::fabs(contrib) * 1e-9;
                if (est_err < 0.5 * tol / kb) {
                    sum = est_deep;
                    err += est_err;
                    settled = true;
                    break;
                }
                if (std::fabs(contrib) < 0.02 * tol / kb) {
                    err += std::fabs(contrib);
                    settled = true;
                    break;
                }
            }
        }
        if (!settled) {
            throw numerical_error("apply_Sb: outer blocks did not settle", kb * err);
        }
        total += sum;
    }

    return {kb * total, kb * err};
}

SbResult apply_Sb_to_green_ball(const StableParams& p, const PerturbationB& b,
                                const geom::Ball& ballg, const ball::FastBallGreen& green,
                                const Vec& x, const Vec& y, const SbGreenOptions& opt) {
    if (b.form() == PerturbationB::Form::Zero) return {0.0, 0.0};
    const geom::Domain dom(ballg);
    if (!dom.contains(x) || !dom.contains(y))
        throw std::domain_error("apply_Sb_to_green_ball: points must be interior");
    const double rxy = dist(x, y);
    if (rxy == 0.0) throw std::domain_error("apply_Sb_to_green_ball: x and y must differ");

    const double kb = special::normalizing_constant(p.d, p.beta);
    const double dx = dom.delta(x);
    const double lambda = 0.5 * std::min(dx, rxy);
    const double gxy = green(x, y);
    const auto rule = quad::sphere_rule(p.d, opt.angular_nodes);

    double total = 0.0;
    double err = 0.0;
    quad::Options o;
    o.abs_tol = 1e-300;
    o.rel_tol = opt.rel_tol;
    o.max_intervals = 400;
    o.throw_on_failure = false;
    o.cancel = opt.cancel;

    // Inner symmetric zone |z| <= lambda: x +- z stays interior and away
    // from y, so the second difference of G is smooth.
    {
        auto w_of_rho = [&](double rho) {
            double s = 0.0;
            for (std::size_t i = 0; i < rule.dirs.size(); ++i) {
                const Vec u = rule_dir(rule, i, p.d);
                const Vec z = u * rho;
                const double bv = b(x, z);
                if (bv == 0.0) continue;
                s += rule.weights[i] * bv *
                     0.5 * (green(x + z, y) + green(x - z, y) - 2.0 * gxy);
            }
            return s;
        };
        const double pw = 1.0 / (2.0 - p.beta);
        auto inner = [&](double v) {
            const double rho = std::pow(v, pw);
            return pw * std::pow(v, -pw * p.beta - 1.0) * w_of_rho(rho);
        };
        auto r = quad::integrate(inner, 0.0, std::pow(lambda, 2.0 - p.beta), o);
        total += r.value;
        err += r.error;
    }

    // -G(x,y) int_{|z|>lambda} b: closed/1D radial form.
    total -= gxy * radial_b_tail(p, b, x, lambda, rule);

    // + int over w in B, |w-x| > lambda of G(w,y) b(x,w-x)|w-x|^{-d-beta}.
    const double dy = dom.delta(y);
    const double rho_y = 0.5 * std::min(dy, 0.5 * rxy);
    double rho_x = std::min(dx, 0.75 * rxy);
    rho_x = std::max(rho_x, std::nextafter(lambda, 1e300));

    // Carve at y in polar coordinates, s = q^{1/alpha} removing the
    // |w-y|^{alpha-d} Green singularity.
    {
        auto w_integrand = [&](double s) {
            double acc = 0.0;
            for (std::size_t i = 0; i < rule.dirs.size(); ++i) {
                const Vec v = rule_dir(rule, i, p.d);
                const Vec w = y + v * s;
                const Vec zx = w - x;
                const double rz = zx.norm();
                if (rz <= lambda) continue;
                const double bv = b(x, zx);
                if (bv == 0.0) continue;
                acc += rule.weights[i] * green(w, y) * bv * std::pow(rz, -p.d - p.beta);
            }
            return acc * std::pow(s, p.d - p.alpha);
        };
        auto inner = [&](double q) {
            const double s = std::pow(q, 1.0 / p.alpha);
            return w_integrand(s) / p.alpha;
        };
        auto r = quad::integrate(inner, 0.0, std::pow(rho_y, p.alpha), o);
        total += r.value;
        err += r.error;
    }

    // Shell lambda < |w-x| < rho_x in polar at x; tau = rho^{-beta}
    // flattens the kernel weight.
    if (rho_x > lambda) {
        auto ang = [&](double rho) {
            double acc = 0.0;
            for (std::size_t i = 0; i < rule.dirs.size(); ++i) {
                const Vec u = rule_dir(rule, i, p.d);
                const Vec w = x + u * rho;
                if (dist(w, y) <= rho_y) continue;
                const Vec z = u * rho;
                const double bv = b(x, z);
                if (bv == 0.0) continue;
                acc += rule.weights[i] * green(w, y) * bv;
            }
            return acc;
        };
        auto f = [&](double tau) {
            const double rho = std::pow(tau, -1.0 / p.beta);
            return ang(rho) / p.beta;
        };
        auto r = quad::integrate(f, std::pow(rho_x, -p.beta), std::pow(lambda, -p.beta), o);
        total += r.value;
        err += r.error;
    }

    // Remainder of the ball: product rule at the ball center with
    // per-direction radial integration split at the carve spheres, so
    // each segment is smooth.
    {
        const std::vector<std::pair<Vec, double>> carves{{x, rho_x}, {y, rho_y}};
        auto ray = [&](const Vec& u) {
            auto f = [&](double s) {
                const Vec w = ballg.center + u * s;
                const Vec zx = w - x;
                const double rz = zx.norm();
                if (rz <= rho_x) return 0.0;
                if (dist(w, y) <= rho_y) return 0.0;
                const double bv = b(x, zx);
                if (bv == 0.0) return 0.0;
                return green(w, y) * bv * std::pow(rz, -p.d - p.beta) *
                       std::pow(s, p.d - 1.0);
            };
            quad::Options ro = o;
            ro.max_intervals = 60;
            quad::Result acc;
            const auto splits = ray_splits(ballg.center, u, ballg.radius, carves);
            for (std::size_t k = 0; k + 1 < splits.size(); ++k) {
                auto r = quad::integrate(f, splits[k], splits[k + 1], ro);
                acc.value += r.value;
                acc.error += r.error;
            }
            return acc;
        };
        for (std::size_t i = 0; i < rule.dirs.size(); ++i) {
            auto r = ray(rule_dir(rule, i, p.d));
            total += rule.weights[i] * r.value;
            err += rule.weights[i] * r.error;
        }
    }

    return {kb * total, kb * err};
}

SbResult apply_Sb_to_green_ball(const StableParams& p, const PerturbationB& b,
                                const geom::Ball& ballg, const Vec& x, const Vec& y,
                                const SbGreenOptions& opt) {
    ball::FastBallGreen green(p, ballg);
    return apply_Sb_to_green_ball(p, b, ballg, green, x, y, opt);
}

double integrate_ball_singular(const geom::Ball& ballg,
                               const std::function<double(const Vec&)>& f,
                               const std::vector<SingularPoint>& sing, int angular_nodes,
                               double rel_tol) {
    const int d = ballg.center.dim();
    const auto rule = quad::sphere_rule(d, angular_nodes);
    quad::Options o;
    o.abs_tol = 1e-300;
    o.rel_tol = rel_tol;
    o.max_intervals = 300;
    o.throw_on_failure = false;

    // Carve radii: stay inside the ball and pairwise disjoint.
    std::vector<double> radii(sing.size());
    for (std::size_t i = 0; i < sing.size(); ++i) {
        double r = 0.5 * (ballg.radius - dist(sing[i].point, ballg.center));
        for (std::size_t j = 0; j < sing.size(); ++j)
            if (j != i) r = std::min(r, 0.45 * dist(sing[i].point, sing[j].point));
        radii[i] = std::max(r, 0.0);
    }

    double total = 0.0;
    for (std::size_t i = 0; i < sing.size(); ++i) {
        if (radii[i] <= 0.0) continue;
        const double expo = sing[i].exponent;
        const Vec c = sing[i].point;
        auto ang = [&](double s) {
            double acc = 0.0;
            for (std::size_t k = 0; k < rule.dirs.size(); ++k) {
                const Vec w = c + rule_dir(rule, k, d) * s;
                acc += rule.weights[k] * f(w);
            }
            // Multiplied by s^{d-1} ds = (1/expo) s^{d-expo} dq with
            // q = s^{expo}; f carries the s^{expo-d} singular power.
            return acc * std::pow(s, static_cast<double>(d) - expo);
        };
        auto inner = [&](double q) { return ang(std::pow(q, 1.0 / expo)) / expo; };
        total += quad::integrate(inner, 0.0, std::pow(radii[i], expo), o).value;
    }

    std::vector<std::pair<Vec, double>> carves;
    for (std::size_t i = 0; i < sing.size(); ++i) carves.emplace_back(sing[i].point, radii[i]);
    auto ray = [&](const Vec& u) {
        auto g = [&](double s) {
            const Vec w = ballg.center + u * s;
            for (std::size_t i = 0; i < sing.size(); ++i)
                if (dist(w, sing[i].point) <= radii[i]) return 0.0;
            return f(w) * std::pow(s, d - 1.0);
        };
        quad::Options ro = o;
        ro.max_intervals = 60;
        double acc = 0.0;
        const auto splits = ray_splits(ballg.center, u, ballg.radius, carves);
        for (std::size_t k = 0; k + 1 < splits.size(); ++k)
            acc += quad::integrate(g, splits[k], splits[k + 1], ro).value;
        return acc;
    };
    for (std::size_t k = 0; k < rule.dirs.size(); ++k)
        total += rule.weights[k] * ray(rule_dir(rule, k, d));
    return total;
}

}  // namespace stablepert::nonlocal
