#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace sybilblind {

using Rng = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x);

/// Derives an independent stream seed from a master seed, a fixed label and
/// an index. Every random consumer in the library seeds itself this way so
/// results never depend on scheduling or wall-clock time.
std::uint64_t derive_seed(std::uint64_t master, std::string_view label, std::uint64_t index = 0);

/// Uniform integer in [0, bound). Portable across standard libraries, unlike
/// std::uniform_int_distribution. bound must be > 0.
std::uint64_t uniform_below(Rng& rng, std::uint64_t bound);

/// Uniform double in [0, 1) with 53 random bits.
double uniform_unit(Rng& rng);

}  // namespace sybilblind
