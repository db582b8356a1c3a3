#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

#include "moreau/vec.hpp"

namespace moreau {

/// Deterministic random stream built on splitmix64. The standard
/// distributions are implementation-defined, so uniforms are derived from
/// raw bits directly; results are bit-identical across platforms.
///
/// Each run owns one stream seeded from the user seed; checkers derive
/// child streams keyed by their name, so adding a check never perturbs the
/// samples another check sees.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller (no cached spare; determinism over speed).
    double normal() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

    /// Independent stream derived from this stream's seed and a label.
    Rng child(std::string_view name) const {
        std::uint64_t h = 0xcbf29ce484222325ull;  // FNV-1a
        for (char c : name) {
            h ^= static_cast<std::uint64_t>(static_cast<unsigned char>(c));
            h *= 0x100000001b3ull;
        }
        return Rng(state_ ^ h);
    }

  private:
    std::uint64_t state_;
};

/// Uniform point in the closed ball B[center, radius].
inline Vec sample_ball(Rng& rng, const Vec& center, double radius) {
    const std::size_t n = center.size();
    Vec dir(n);
    double nrm = 0.0;
    do {
        for (std::size_t i = 0; i < n; ++i) dir[i] = rng.normal();
        nrm = norm(dir);
    } while (nrm == 0.0);
    const double r = radius * std::pow(rng.uniform(), 1.0 / static_cast<double>(n));
    Vec p(n);
    for (std::size_t i = 0; i < n; ++i) p[i] = center[i] + r * dir[i] / nrm;
    return p;
}

}  // namespace moreau
