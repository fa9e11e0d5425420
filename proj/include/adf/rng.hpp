#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace adf {

using Rng = std::mt19937_64;

/// Derives an independent seed for a named sub-stream (e.g. "bootstrap",
/// "induction", "simulation") and an index within it. Every random decision
/// in the library is drawn from a stream seeded this way, so adding a new
/// consumer never shifts the draws of an existing one.
inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view stream, std::uint64_t index = 0) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : stream) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  std::uint64_t z = seed ^ (h + 0x9e3779b97f4a7c15ULL + (index << 6) + (index >> 2));
  z += 0x9e3779b97f4a7c15ULL * (index + 1);
  // splitmix64 finaliser
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline Rng make_rng(std::uint64_t seed, std::string_view stream, std::uint64_t index = 0) {
  return Rng(derive_seed(seed, stream, index));
}

inline std::size_t uniform_index(Rng& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

}  // namespace adf
