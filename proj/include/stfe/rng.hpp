#pragma once

#include <cmath>
#include <cstdint>

namespace stfe {

// Counter-based random numbers: every draw is a pure function of
// (seed, replicate, step, mode, draw index), so replicates and steps can be
// evaluated in any order, on any thread, with identical results.
namespace rng {

inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t counter_key(std::uint64_t seed, std::uint64_t replicate, std::uint64_t step,
                                 std::uint64_t mode) {
    std::uint64_t k = mix64(seed);
    k = mix64(k ^ mix64(replicate ^ 0x7f4a7c15f39cc060ULL));
    k = mix64(k ^ mix64(step ^ 0x9e3779b97f4a7c15ULL));
    k = mix64(k ^ mix64(mode ^ 0xbf58476d1ce4e5b9ULL));
    return k;
}

// Uniform in the open interval (0,1).
inline double uniform_from_bits(std::uint64_t bits) {
    return (double(bits >> 11) + 0.5) * 0x1.0p-53;
}

// Standard normal via Box-Muller on two counter-derived uniforms.
inline double standard_normal(std::uint64_t seed, std::uint64_t replicate, std::uint64_t step,
                              std::uint64_t mode) {
    const std::uint64_t k = counter_key(seed, replicate, step, mode);
    const double u1 = uniform_from_bits(mix64(k ^ 0x243f6a8885a308d3ULL));
    const double u2 = uniform_from_bits(mix64(k ^ 0x13198a2e03707344ULL));
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

// Per-replicate seed derivation; injective in replicate for a fixed base seed
// because mix64 is a bijection on 64-bit words.
inline std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t replicate) {
    return mix64(base_seed ^ mix64(replicate));
}

}  // namespace rng

// Position of a noise stream: which path and which step draws come from.
struct RngStream {
    std::uint64_t seed = 0;
    std::uint64_t replicate = 0;
    std::uint64_t step = 0;

    double normal(std::uint64_t mode) const {
        return rng::standard_normal(seed, replicate, step, mode);
    }
};

}  // namespace stfe
