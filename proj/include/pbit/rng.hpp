#pragma once

#include <cstdint>
#include <random>

namespace pbit {

using Rng = std::mt19937_64;

/// SplitMix64 mixing step. Cheap way to turn structured seed material
/// (campaign seed, trial index, purpose tag) into well-separated seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0) {
  std::uint64_t x = splitmix64(base ^ 0x6a09e667f3bcc909ULL);
  x = splitmix64(x ^ a);
  return splitmix64(x ^ b);
}

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

inline double uniform01(Rng& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

inline double gaussian(Rng& rng, double mean, double sigma) {
  if (sigma <= 0.0) return mean;
  return std::normal_distribution<double>(mean, sigma)(rng);
}

}  // namespace pbit
