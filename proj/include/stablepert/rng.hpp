#pragma once

#include <cmath>
#include <cstdint>

#include "stablepert/vec.hpp"

namespace stablepert {

/// Counter-keyed random stream: xoshiro256++ seeded through splitmix64
/// from a (seed, stream index) pair.  Streams for distinct indices are
/// statistically independent, and a stream's output depends only on its
/// key and draw count, never on thread scheduling.
class Rng {
  public:
    Rng(std::uint64_t seed, std::uint64_t stream) {
        std::uint64_t x = seed ^ (0x9E3779B97F4A7C15ull * (stream + 1));
        for (auto& si : s_) si = splitmix64(x);
        // Warm up so that nearby keys decorrelate.
        for (int i = 0; i < 4; ++i) next_u64();
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform on (0, 1]; safe as an argument of log().
    double uniform_pos() { return 1.0 - uniform(); }

    double exponential() { return -std::log(uniform_pos()); }

    /// Standard normal via Box-Muller (always consumes two uniforms, so
    /// the draw count is deterministic).
    double normal() {
        const double u = uniform_pos();
        const double v = uniform();
        return std::sqrt(-2.0 * std::log(u)) * std::cos(6.283185307179586477 * v);
    }

    /// Uniform direction on the unit sphere S^{d-1}.
    Vec sphere_direction(int d) {
        Vec u(d);
        while (true) {
            double n2 = 0.0;
            for (int i = 0; i < d; ++i) {
                u[i] = normal();
                n2 += u[i] * u[i];
            }
            if (n2 > 1e-30) {
                u *= 1.0 / std::sqrt(n2);
                return u;
            }
        }
    }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    static std::uint64_t splitmix64(std::uint64_t& x) {
        x += 0x9E3779B97F4A7C15ull;
        std::uint64_t z = x;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    std::uint64_t s_[4];
};

}  // namespace stablepert
