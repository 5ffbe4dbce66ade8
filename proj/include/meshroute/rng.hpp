#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "errors.hpp"

namespace meshroute {

// ---- deterministic random primitives ----
// std::mt19937_64 has a portable, standard-pinned output sequence, but the
// std distribution adapters (<random> uniform_real_distribution etc.) do not.
// Everything that affects artifact output goes through the helpers below so
// results are bit-identical across standard libraries.

using Rng = std::mt19937_64;

// Uniform double in [0, 1): top 53 bits of one engine draw.
inline double uniform_double(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform double in [lo, hi).
inline double uniform_in(Rng& rng, double lo, double hi) {
    return lo + uniform_double(rng) * (hi - lo);
}

// Uniform integer in [0, n) via rejection sampling (no modulo bias).
inline std::size_t uniform_index(Rng& rng, std::size_t n) {
    if (n == 0) throw InvalidArgumentError("uniform_index: n must be positive");
    if (n == 1) return 0;
    const std::uint64_t span = n;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return static_cast<std::size_t>(x % span);
}

// Standard normal via Box-Muller (two fresh draws per call, no cached spare,
// so the consumed engine state per call is fixed).
inline double normal(Rng& rng) {
    double u1;
    do {
        u1 = uniform_double(rng);
    } while (u1 <= 0.0);
    const double u2 = uniform_double(rng);
    const double r = std::sqrt(-2.0 * std::log(u1));
    return r * std::cos(2.0 * 3.14159265358979323846 * u2);
}

// splitmix64 finalizer: stable scrambling for derived stream seeds.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Deterministic sub-stream seed from a base seed and stream tags.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t tag_a,
                                 std::uint64_t tag_b = 0) {
    return mix64(mix64(base ^ 0x6d657368726f7574ULL) ^ mix64(tag_a) ^
                 mix64(~tag_b));
}

} // namespace meshroute
