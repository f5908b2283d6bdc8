#pragma once

// Shared test helpers: a portable deterministic RNG (std:: distributions are
// implementation-defined, so frozen expectations would not travel across
// standard libraries) and samplers for the state triangle.

#include <cstdint>

#include "crossdiff/types.hpp"

namespace testsupport {

struct SplitMix64 {
    std::uint64_t s;
    explicit SplitMix64(std::uint64_t seed) : s(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (s += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    double uniform() { return double(next() >> 11) * 0x1.0p-53; } // [0, 1)

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
};

/// Uniform sample of the open triangle, at least `margin` from every edge.
inline crossdiff::Vec2 random_interior(SplitMix64& rng, double margin = 1e-3) {
    for (;;) {
        const double u1 = rng.uniform(margin, 1.0 - 2.0 * margin);
        const double u2 = rng.uniform(margin, 1.0 - 2.0 * margin);
        if (u1 + u2 < 1.0 - margin) return {u1, u2};
    }
}

} // namespace testsupport
