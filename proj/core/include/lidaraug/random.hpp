#pragma once

#include <cstdint>
#include <random>

namespace lidaraug {

using Rng = std::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Counter-based stream derivation: the same (seed, stream, index) always yields the
/// same generator, independent of how many other streams were drawn before.
inline Rng derive_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t index = 0) {
  const std::uint64_t k = splitmix64(splitmix64(splitmix64(seed) ^ stream) ^ index);
  std::seed_seq seq{static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
  return Rng(seq);
}

inline double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

inline bool bernoulli(Rng& rng, double p) { return uniform01(rng) < p; }

}  // namespace lidaraug
