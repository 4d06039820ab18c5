#pragma once

#include <cstdint>
#include <random>

namespace bagcv {

using Rng = std::mt19937_64;

/// Independent generator for substream `stream` of `seed`. Results depend only
/// on (seed, stream), so work can be scheduled on any number of threads.
Rng derived_stream(std::uint64_t seed, std::uint64_t stream);

/// Seed for a nested study level (replicate -> resample).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace bagcv
