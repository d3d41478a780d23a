#include "stablepert/geometry.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace stablepert::geom {

Domain::Domain(Ball b) : balls_{std::move(b)} {
    if (!(balls_[0].radius > 0.0)) throw std::invalid_argument("Domain: radius must be positive");
}

Domain::Domain(std::vector<Ball> balls) : balls_(std::move(balls)) {
    if (balls_.empty()) throw std::invalid_argument("Domain: component list empty");
    for (const auto& b : balls_) {
        if (!(b.radius > 0.0)) throw std::invalid_argument("Domain: radius must be positive");
        if (b.center.dim() != balls_[0].center.dim())
            throw std::invalid_argument("Domain: mixed dimensions");
    }
    for (std::size_t i = 0; i < balls_.size(); ++i)
        for (std::size_t j = i + 1; j < balls_.size(); ++j)
            if (dist(balls_[i].center, balls_[j].center) <=
                balls_[i].radius + balls_[j].radius)
                throw std::invalid_argument("Domain: component closures overlap or touch");
}

const Ball& Domain::ball() const {
    if (!is_single_ball()) throw std::logic_error("Domain: not a single ball");
    return balls_[0];
}

bool Domain::contains(const Vec& x) const { return component_of(x) >= 0; }

int Domain::component_of(const Vec& x) const {
    for (std::size_t i = 0; i < balls_.size(); ++i)
        if (dist(x, balls_[i].center) < balls_[i].radius) return static_cast<int>(i);
    return -1;
}

double Domain::delta(const Vec& x) const {
    // For disjoint ball closures, the nearest boundary of an interior
    // point is its own component's sphere.
    const int c = component_of(x);
    if (c < 0) return 0.0;
    return balls_[c].radius - dist(x, balls_[c].center);
}

double Domain::scale() const {
    double r = 0.0;
    for (const auto& b : balls_) r = std::max(r, b.radius);
    return r;
}

double Domain::diameter() const {
    double d = 0.0;
    for (std::size_t i = 0; i < balls_.size(); ++i)
        for (std::size_t j = 0; j < balls_.size(); ++j) {
            const double c = dist(balls_[i].center, balls_[j].center) + balls_[i].radius +
                             balls_[j].radius;
            if (i != j) d = std::max(d, c);
        }
    if (balls_.size() == 1) d = 2.0 * balls_[0].radius;
    return d;
}

double Domain::component_distance(int i, int j) const {
    const auto& a = balls_.at(i);
    const auto& b = balls_.at(j);
    return std::max(0.0, dist(a.center, b.center) - a.radius - b.radius);
}

Vec Domain::inner_ball_witness(const Vec& x, double r) const {
    const int c = component_of(x);
    if (c < 0) throw std::domain_error("inner_ball_witness: point not interior");
    const Ball& b = balls_[c];
    Vec u = b.center - x;
    const double n = u.norm();
    if (n > 0.0) {
        u *= 1.0 / n;
    } else {
        u = Vec(dim());
        u[0] = 1.0;
    }
    // Step half of r toward the center: B(A, r/2) stays inside both
    // B(x, r) and the component ball whenever r <= radius.
    return x + (0.5 * r) * u;
}

double r_profile(const Domain& dom, const Vec& x, const Vec& y) {
    return dom.delta(x) + dom.delta(y) + dist(x, y);
}

double profile_fd(const Domain& dom, const StableParams& p, double t, const Vec& x, const Vec& y) {
    if (!(t > 0.0)) throw std::domain_error("profile_fd: t must be positive");
    if (!dom.contains(x) || !dom.contains(y))
        throw std::domain_error("profile_fd: points must lie in the domain");
    const double sqt = std::sqrt(t);
    const double bx = std::min(1.0, std::pow(dom.delta(x), 0.5 * p.alpha) / sqt);
    const double by = std::min(1.0, std::pow(dom.delta(y), 0.5 * p.alpha) / sqt);
    const double r = dist(x, y);
    const double diag = std::pow(t, -static_cast<double>(p.d) / p.alpha);
    const double q = r > 0.0 ? std::min(diag, t * std::pow(r, -(p.d + p.alpha))) : diag;
    return bx * by * q;
}

ExtReal profile_gd(const Domain& dom, const StableParams& p, const Vec& x, const Vec& y) {
    const double r = dist(x, y);
    if (r == 0.0) return ExtReal::infinity();
    const double cx = std::min(1.0, dom.delta(x) / r);
    const double cy = std::min(1.0, dom.delta(y) / r);
    return std::pow(r, p.alpha - p.d) * std::pow(cx * cy, 0.5 * p.alpha);
}

ExtReal profile_hd(const Domain& dom, const StableParams& p, const Vec& x, const Vec& y) {
    const double r = dist(x, y);
    if (r == 0.0) return ExtReal::infinity();
    const double dx = dom.delta(x);
    const double dy = dom.delta(y);
    if (p.alpha > 2.0 * p.beta) {
        return std::pow(r, p.alpha - p.beta - p.d) *
               std::pow(std::min(1.0, dy / r), 0.5 * p.alpha);
    }
    if (p.alpha == 2.0 * p.beta) {
        const double logf = dx > 0.0 ? std::max(1.0, std::log(r / dx))
                                     : std::numeric_limits<double>::infinity();
        if (!std::isfinite(logf)) return ExtReal::infinity();
        return std::pow(r, p.beta - p.d) * std::pow(std::min(1.0, dy / r), p.beta) * logf;
    }
    const double boundary = dx > 0.0 ? std::pow(std::max(1.0, r / dx), p.beta - 0.5 * p.alpha)
                                     : std::numeric_limits<double>::infinity();
    if (!std::isfinite(boundary)) return ExtReal::infinity();
    return std::pow(r, p.alpha - p.beta - p.d) *
           std::pow(std::min(1.0, dy / r), 0.5 * p.alpha) * boundary;
}

}  // namespace stablepert::geom
