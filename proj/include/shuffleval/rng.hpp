#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace shuffleval {

// Every stochastic routine draws from this engine. mt19937_64 output is fixed
// by the C++ standard; the helpers below avoid std distributions, whose
// algorithms are implementation-defined, so streams replay across toolchains.
using Rng = std::mt19937_64;

inline constexpr std::string_view kRngAlgorithm =
    "mt19937_64+lemire-bounded+splitmix64-derive";

// Uniform integer in [0, bound). bound must be > 0.
std::uint64_t uniform_index(Rng& rng, std::uint64_t bound);

// Uniform double in [0, 1) with 53 random bits.
double uniform01(Rng& rng);

// Standard normal via Box-Muller (consumes two draws per call).
double standard_normal(Rng& rng);

// Independent child seed for stream `index` of a parent seed.
std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index);

// Stable 64-bit FNV-1a, used to key per-document seeds.
std::uint64_t fnv1a64(std::string_view text);

}  // namespace shuffleval
