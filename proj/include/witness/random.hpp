#pragma once

#include <cstdint>
#include <random>

namespace witness {

using Seed = std::uint64_t;
using Rng = std::mt19937_64;

/// SplitMix64 finalizer. Used to turn (seed, stream index) pairs into
/// decorrelated seeds for independent substreams.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Seed of substream `stream` under `parent`. Work items that must not
/// depend on scheduling derive their generator from this.
constexpr Seed derive_seed(Seed parent, std::uint64_t stream) {
  return splitmix64(splitmix64(parent) ^ splitmix64(stream + 0x632BE59BD9B4E019ULL));
}

inline Rng make_rng(Seed seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  return Rng(seq);
}

}  // namespace witness
