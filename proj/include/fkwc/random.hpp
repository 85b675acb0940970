#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace fkwc {

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seed of an independent stream identified by (seed, ids...). The result
/// depends only on the values, never on call order or thread scheduling.
inline std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> ids) noexcept {
  std::uint64_t h = mix64(seed);
  for (std::uint64_t id : ids) h = mix64(h ^ mix64(id + 0x632be59bd9b4e019ULL));
  return h;
}

using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t seed, std::initializer_list<std::uint64_t> ids) {
  return Rng(derive_seed(seed, ids));
}

// Stream tags so that different consumers of one seed never share a stream.
namespace stream {
inline constexpr std::uint64_t projection = 0x5250;    // random projection directions
inline constexpr std::uint64_t tie_break = 0x54494521;  // rank tie breaking
inline constexpr std::uint64_t replicate = 0x52455053;  // Monte Carlo replicate data
inline constexpr std::uint64_t pair = 0x50414952;       // pairwise comparisons
}  // namespace stream

}  // namespace fkwc
