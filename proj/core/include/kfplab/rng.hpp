#pragma once

#include <cstdint>
#include <cmath>

namespace kfplab {

/// Counter-based generator: every draw is a pure hash of (seed, key words),
/// so parallel and serial sample orders produce identical streams.
namespace rng {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t hash_key(std::uint64_t seed, std::uint64_t k0, std::uint64_t k1 = 0,
                              std::uint64_t k2 = 0) {
    std::uint64_t h = splitmix64(seed ^ 0x2545f4914f6cdd1dULL);
    h = splitmix64(h ^ k0);
    h = splitmix64(h ^ k1);
    h = splitmix64(h ^ k2);
    return h;
}

/// Uniform in (0,1) from a keyed counter; never returns exactly 0.
inline double uniform01(std::uint64_t seed, std::uint64_t k0, std::uint64_t k1 = 0,
                        std::uint64_t k2 = 0) {
    const std::uint64_t h = hash_key(seed, k0, k1, k2);
    return (static_cast<double>(h >> 11) + 0.5) * 0x1.0p-53;
}

/// Uniform in [a,b).
inline double uniform(std::uint64_t seed, double a, double b, std::uint64_t k0,
                      std::uint64_t k1 = 0, std::uint64_t k2 = 0) {
    return a + (b - a) * uniform01(seed, k0, k1, k2);
}

/// Standard normal pair via Box-Muller on two keyed uniforms.
inline void normal_pair(std::uint64_t seed, std::uint64_t k0, std::uint64_t k1,
                        std::uint64_t k2, double& n0, double& n1) {
    const double u1 = uniform01(seed, k0, k1, 2 * k2);
    const double u2 = uniform01(seed, k0, k1, 2 * k2 + 1);
    const double r = std::sqrt(-2.0 * std::log(u1));
    n0 = r * std::cos(6.283185307179586476925286766559 * u2);
    n1 = r * std::sin(6.283185307179586476925286766559 * u2);
}

}  // namespace rng

}  // namespace kfplab
