#include "stablepert/exact_ball.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <stdexcept>

#include "stablepert/quadrature.hpp"

namespace stablepert::ball {

namespace {

double ball_green_prefactor(int d, double alpha) {
    return std::pow(2.0, -alpha) * std::pow(M_PI, -0.5 * d) * std::tgamma(0.5 * d) /
           (std::tgamma(0.5 * alpha) * std::tgamma(0.5 * alpha));
}

double beta_total(int d, double alpha) {
    return std::tgamma(0.5 * alpha) * std::tgamma(0.5 * (d - alpha)) / std::tgamma(0.5 * d);
}

}  // namespace

double green_global_constant(int d, double alpha) {
    return std::pow(2.0, -alpha) * std::pow(M_PI, -0.5 * d) * std::tgamma(0.5 * (d - alpha)) /
           std::tgamma(0.5 * alpha);
}

ExtReal green_global(const StableParams& p, const Vec& x, const Vec& y) {
    const double r = dist(x, y);
    if (r == 0.0) return ExtReal::infinity();
    return green_global_constant(p.d, p.alpha) * std::pow(r, p.alpha - p.d);
}

double green_ball_integral(int d, double alpha, double z, double rel_tol) {
    if (z < 0.0) throw std::domain_error("green_ball_integral: z must be nonnegative");
    if (z == 0.0) return 0.0;
    quad::Options opt;
    opt.abs_tol = 1e-300;
    opt.rel_tol = rel_tol;
    opt.max_intervals = 4000;
    if (z <= 1.0) {
        // u = v^{2/alpha} removes the endpoint singularity u^{alpha/2-1}.
        const double top = std::pow(z, 0.5 * alpha);
        const double e = 2.0 / alpha;
        auto f = [&](double v) { return std::pow(std::pow(v, e) + 1.0, -0.5 * d); };
        return e * quad::integrate(f, 0.0, top, opt).value;
    }
    // Complement of the convergent full integral; the substitution
    // w = v^{2/(d-alpha)} flattens the w^{(d-alpha)/2-1} endpoint.
    const double e = 2.0 / (d - alpha);
    auto f = [&](double v) { return std::pow(z + std::pow(v, e), -0.5 * d); };
    const double tail = e * std::pow(z, 0.5 * alpha) * quad::integrate(f, 0.0, 1.0, opt).value;
    return beta_total(d, alpha) - tail;
}

namespace {

/// Geometric argument z of the ball Green formula, or -1 when a point
/// lies outside the closed ball.
double green_z(const geom::Ball& b, const Vec& x, const Vec& y) {
    const double dx2 = b.radius * b.radius - (x - b.center).norm2();
    const double dy2 = b.radius * b.radius - (y - b.center).norm2();
    if (dx2 < 0.0 || dy2 < 0.0) return -1.0;
    const double r2 = (x - y).norm2();
    return dx2 * dy2 / r2;
}

}  // namespace

ExtReal green_ball(const StableParams& p, const geom::Ball& b, const Vec& x, const Vec& y) {
    if (dist(x, y) == 0.0) {
        if (dist(x, b.center) > b.radius)
            throw std::domain_error("green_ball: points outside the closed ball");
        return ExtReal::infinity();
    }
    const double z = green_z(b, x, y);
    if (z < 0.0) throw std::domain_error("green_ball: points outside the closed ball");
    const double r = dist(x, y);
    return ball_green_prefactor(p.d, p.alpha) * green_ball_integral(p.d, p.alpha, z, 1e-10) *
           std::pow(r, p.alpha - p.d);
}

double poisson_ball(const StableParams& p, const geom::Ball& b, const Vec& x, const Vec& y) {
    const double rx = dist(x, b.center);
    const double ry = dist(y, b.center);
    if (rx >= b.radius) throw std::domain_error("poisson_ball: x must be interior");
    if (ry <= b.radius) throw std::domain_error("poisson_ball: y must be exterior");
    const double c = std::tgamma(0.5 * p.d) * std::sin(0.5 * M_PI * p.alpha) *
                     std::pow(M_PI, -0.5 * p.d - 1.0);
    const double num = b.radius * b.radius - rx * rx;
    const double den = ry * ry - b.radius * b.radius;
    return c * std::pow(num / den, 0.5 * p.alpha) * std::pow(dist(x, y), -p.d);
}

namespace detail {

double GreenIntegralTable::eval(double z) const {
    if (z <= z_lo) {
        // Leading behavior I(z) ~ (2/alpha) z^{alpha/2} below the table.
        return (2.0 / alpha) * std::pow(z, 0.5 * alpha);
    }
    if (z >= z_hi) return i_total;
    const double u = (std::log(z) - log_z_lo) / dlog;
    const int i = std::min(static_cast<int>(u), static_cast<int>(log_i.size()) - 2);
    const double w = u - i;
    return std::exp((1.0 - w) * log_i[i] + w * log_i[i + 1]);
}

std::shared_ptr<const GreenIntegralTable> green_integral_table(int d, double alpha) {
    static std::mutex mu;
    static std::map<std::pair<int, double>, std::shared_ptr<const GreenIntegralTable>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[{d, alpha}];
    if (!slot) {
        auto t = std::make_shared<GreenIntegralTable>();
        t->alpha = alpha;
        t->i_total = beta_total(d, alpha);
        t->z_lo = 1e-12;
        t->z_hi = 1e12;
        const int n = 4200;
        t->log_z_lo = std::log(t->z_lo);
        t->dlog = (std::log(t->z_hi) - t->log_z_lo) / (n - 1);
        t->log_i.resize(n);
        for (int i = 0; i < n; ++i) {
            const double z = std::exp(t->log_z_lo + i * t->dlog);
            t->log_i[i] = std::log(green_ball_integral(d, alpha, z, 1e-11));
        }
        slot = std::move(t);
    }
    return slot;
}

}  // namespace detail

FastBallGreen::FastBallGreen(const StableParams& p, const geom::Ball& b)
    : params_(p), ball_(b) {
    prefactor_ = ball_green_prefactor(p.d, p.alpha);
    table_ = detail::green_integral_table(p.d, p.alpha);
}

double FastBallGreen::operator()(const Vec& x, const Vec& y) const {
    const double z = green_z(ball_, x, y);
    if (z < 0.0) return 0.0;  // killed-process extension by zero
    const double r2 = (x - y).norm2();
    if (r2 == 0.0) return std::numeric_limits<double>::infinity();
    return prefactor_ * table_->eval(z) * std::pow(r2, 0.5 * (params_.alpha - params_.d));
}

}  // namespace stablepert::ball
