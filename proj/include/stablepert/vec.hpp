#pragma once

#include <array>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <limits>

namespace stablepert {

/// Small fixed-capacity Euclidean vector with runtime dimension.
/// Dimensions up to kMaxDim are supported without heap allocation;
/// the Monte Carlo engine creates millions of these per run.
class Vec {
  public:
    static constexpr int kMaxDim = 8;

    Vec() : dim_(0) { c_.fill(0.0); }
    explicit Vec(int dim) : dim_(dim) {
        assert(dim >= 0 && dim <= kMaxDim);
        c_.fill(0.0);
    }
    Vec(std::initializer_list<double> xs) : dim_(static_cast<int>(xs.size())) {
        assert(dim_ <= kMaxDim);
        c_.fill(0.0);
        int i = 0;
        for (double x : xs) c_[i++] = x;
    }

    int dim() const { return dim_; }
    double operator[](int i) const { return c_[i]; }
    double& operator[](int i) { return c_[i]; }

    Vec& operator+=(const Vec& o) {
        for (int i = 0; i < dim_; ++i) c_[i] += o.c_[i];
        return *this;
    }
    Vec& operator-=(const Vec& o) {
        for (int i = 0; i < dim_; ++i) c_[i] -= o.c_[i];
        return *this;
    }
    Vec& operator*=(double s) {
        for (int i = 0; i < dim_; ++i) c_[i] *= s;
        return *this;
    }

    friend Vec operator+(Vec a, const Vec& b) { return a += b; }
    friend Vec operator-(Vec a, const Vec& b) { return a -= b; }
    friend Vec operator*(Vec a, double s) { return a *= s; }
    friend Vec operator*(double s, Vec a) { return a *= s; }

    friend double dot(const Vec& a, const Vec& b) {
        double s = 0.0;
        for (int i = 0; i < a.dim_; ++i) s += a.c_[i] * b.c_[i];
        return s;
    }
    double norm2() const { return dot(*this, *this); }
    double norm() const { return std::sqrt(norm2()); }

    friend bool operator==(const Vec& a, const Vec& b) {
        if (a.dim_ != b.dim_) return false;
        for (int i = 0; i < a.dim_; ++i)
            if (a.c_[i] != b.c_[i]) return false;
        return true;
    }

  private:
    std::array<double, kMaxDim> c_;
    int dim_;
};

inline double dist(const Vec& a, const Vec& b) { return (a - b).norm(); }

/// Extended real used for profile values that are legitimately infinite
/// on the diagonal.  Downstream code must branch on finite() instead of
/// doing arithmetic with floating-point infinities.
class ExtReal {
  public:
    ExtReal() : v_(0.0), finite_(true) {}
    /*implicit*/ ExtReal(double v) : v_(v), finite_(true) {}

    static ExtReal infinity() {
        ExtReal e;
        e.finite_ = false;
        e.v_ = std::numeric_limits<double>::infinity();
        return e;
    }

    bool finite() const { return finite_; }
    /// Value; meaningful only when finite().
    double value() const {
        assert(finite_);
        return v_;
    }
    /// Value with +inf substituted when not finite (for printing).
    double value_or_inf() const { return finite_ ? v_ : std::numeric_limits<double>::infinity(); }

  private:
    double v_;
    bool finite_;
};

}  // namespace stablepert
