#pragma once

#include <stdexcept>

namespace stablepert {

/// Global model scalars: dimension and the two stability indices.
/// The driving process has generator index alpha; the perturbation acts
/// at the strictly lower order beta.
struct StableParams {
    int d;
    double alpha;
    double beta;

    StableParams(int d_, double alpha_, double beta_) : d(d_), alpha(alpha_), beta(beta_) {
        if (d < 2) throw std::invalid_argument("StableParams: dimension must be >= 2");
        if (!(0.0 < beta && beta < alpha && alpha < 2.0))
            throw std::invalid_argument("StableParams: need 0 < beta < alpha < 2");
    }
};

}  // namespace stablepert
