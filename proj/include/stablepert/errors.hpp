#pragma once

#include <stdexcept>
#include <string>

namespace stablepert {

/// Quadrature or iteration failed to reach the requested tolerance.
/// Carries the error estimate actually achieved so callers can decide
/// whether the partial result is still usable.
class numerical_error : public std::runtime_error {
  public:
    numerical_error(const std::string& what, double achieved_error)
        : std::runtime_error(what + " (achieved error estimate " + std::to_string(achieved_error) +
                             ")"),
          achieved_error_(achieved_error) {}

    double achieved_error() const { return achieved_error_; }

  private:
    double achieved_error_;
};

/// The perturbation series does not contract at the requested ball radius.
class contraction_error : public std::runtime_error {
  public:
    contraction_error(const std::string& what, double factor)
        : std::runtime_error(what + " (term ratio " + std::to_string(factor) + ")"),
          factor_(factor) {}

    double factor() const { return factor_; }

  private:
    double factor_;
};

/// A cooperative cancellation was observed mid-computation.
class cancelled_error : public std::runtime_error {
  public:
    cancelled_error() : std::runtime_error("computation cancelled") {}
};

}  // namespace stablepert
