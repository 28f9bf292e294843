#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>

namespace affmap {

// All random draws go through these helpers instead of <random>
// distributions, whose output is implementation-defined. mt19937_64 itself
// is fully specified by the standard, so runs reproduce across platforms.

/// Uniform double in [0,1) with 53 bits of entropy.
inline double uniform01(std::mt19937_64& gen) {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, n). Rejection sampling, no modulo bias.
inline std::size_t uniform_index(std::mt19937_64& gen, std::size_t n) {
    if (n == 0) throw std::invalid_argument("uniform_index: n must be positive");
    const std::uint64_t limit = (UINT64_MAX / n) * n;
    std::uint64_t r = gen();
    while (r >= limit) r = gen();
    return static_cast<std::size_t>(r % n);
}

/// Standard normal via Box-Muller. Draws two uniforms per call and discards
/// the second variate so the generator state depends only on the call count.
inline double normal01(std::mt19937_64& gen) {
    double u1 = uniform01(gen);
    const double u2 = uniform01(gen);
    while (u1 <= 0.0) u1 = uniform01(gen);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

/// Bernoulli draw with success probability prob.
inline bool bernoulli(std::mt19937_64& gen, double prob) {
    return uniform01(gen) < prob;
}

/// Categorical draw over non-negative weights (need not be normalized).
inline std::size_t categorical(std::mt19937_64& gen, std::span<const double> weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    if (!(total > 0.0)) throw std::invalid_argument("categorical: weights must have positive sum");
    const double x = uniform01(gen) * total;
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        acc += weights[i];
        if (x < acc) return i;
    }
    return weights.size() - 1;
}

/// splitmix64 step; used to derive independent sub-seeds from a master seed.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace affmap
