#pragma once

#include <cstdint>
#include <random>

namespace hybridnet {

using Rng = std::mt19937_64;

inline double uniform01(Rng& rng) {
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

/// Uniform integer in [0, n). Requires n >= 1.
inline int uniform_below(Rng& rng, int n) {
    return std::uniform_int_distribution<int>(0, n - 1)(rng);
}

/// splitmix64 finalizer.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Derives a stream seed from a base seed and up to two indices, so nested
/// runs (e.g. probes inside a bisection) get seeds unrelated to the base
/// sequence seed, seed+1, ...
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0) {
    return mix64(mix64(base ^ 0x8badf00d5eed1234ULL) ^ mix64(a) ^ mix64(mix64(b)));
}

}  // namespace hybridnet
