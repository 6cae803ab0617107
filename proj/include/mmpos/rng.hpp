#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace mmpos {

// Counter-based Gaussian stream: the value at (seed, index) is a pure hash,
// so parallel and serial tensor fills agree bitwise regardless of order.
namespace rng {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// Uniform in (0, 1]; never returns 0 so it is safe under log().
inline double uniform(std::uint64_t seed, std::uint64_t counter) {
    const std::uint64_t h = splitmix64(splitmix64(seed) ^ splitmix64(counter));
    return (static_cast<double>(h >> 11) + 1.0) * 0x1p-53;
}

// Standard normal via Box-Muller on counters (2i, 2i+1).
inline double normal(std::uint64_t seed, std::uint64_t index) {
    const double u1 = uniform(seed, 2 * index);
    const double u2 = uniform(seed, 2 * index + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace rng
}  // namespace mmpos
