#pragma once

#include <cstdint>
#include <random>

namespace qpe {

/// Engine used for all sampling. Trials never share an engine; each one is
/// seeded from (master seed, stream index) through `stream_seed`.
using Rng = std::mt19937_64;

/// SplitMix64 finalizer applied to the pair; distinct streams of the same
/// master seed are statistically independent for practical purposes.
std::uint64_t stream_seed(std::uint64_t master_seed, std::uint64_t stream);

inline Rng make_rng(std::uint64_t master_seed, std::uint64_t stream = 0) {
  return Rng(stream_seed(master_seed, stream));
}

/// Uniform draw on [0, 1).
inline double uniform01(Rng& rng) {
  return std::generate_canonical<double, 53>(rng);
}

}  // namespace qpe
