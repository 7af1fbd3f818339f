// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <random>

namespace cbo {

using Rng = std::mt19937_64;

// Stream identifiers for seed derivation. Every random quantity in a run is
// drawn from a generator seeded by derive_seed(parent, stream, index), so
// results never depend on evaluation order or thread count.
enum class Stream : std::uint64_t {
  kUserPositions = 1,
  kLink = 2,
  kInitialDesign = 3,
  kCandidates = 4,
  kObjective = 5,
  kFinalEval = 6,
  kHyperStarts = 7,
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t parent, Stream stream, std::uint64_t index = 0) {
  std::uint64_t h = splitmix64(parent);
  h = splitmix64(h ^ static_cast<std::uint64_t>(stream));
  return splitmix64(h ^ index);
}

inline Rng make_rng(std::uint64_t parent, Stream stream, std::uint64_t index = 0) {
  return Rng(derive_seed(parent, stream, index));
}

// Uniform double in [0, 1) from the top 53 bits. Used instead of
// std::uniform_real_distribution so draws are identical across standard
// library implementations.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline double uniform(Rng& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

}  // namespace cbo
