#pragma once

#include <cstdint>
#include <random>

#include "core/types.hpp"

namespace nfloc {

// All simulation randomness flows through this engine. Per-trial engines are
// seeded with derive_seed(), so records do not depend on execution order.
using Rng = std::mt19937_64;

inline constexpr const char* kRngAlgorithm =
    "mt19937_64 seeded by splitmix64(seed ^ splitmix64(stream))";

std::uint64_t splitmix64(std::uint64_t x);

// Seed for an independent stream (trial, restart, ...) of a 64-bit master seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

// Normalized isotropic Gaussian draw.
UnitVec3 uniform_on_sphere(Rng& rng);

double uniform(Rng& rng, double lo, double hi);

double standard_normal(Rng& rng);

}  // namespace nfloc
