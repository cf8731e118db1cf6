#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace test_support {

// uniform in [0, 1) from raw engine bits; avoids std::uniform_real_distribution
// so the stream is identical across standard libraries
inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(rng);
}

// symmetric two-point +/-1
inline double random_sign(std::mt19937_64& rng) {
    return ((rng() >> 32) & 1u) ? -1.0 : 1.0;
}

inline std::vector<double> random_coefficients(std::mt19937_64& rng, std::size_t n,
                                               double lo = 0.1, double hi = 1.0) {
    std::vector<double> out(n);
    for (auto& v : out) v = random_sign(rng) * uniform(rng, lo, hi);
    return out;
}

} // namespace test_support
