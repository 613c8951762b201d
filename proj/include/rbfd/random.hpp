#pragma once

#include <cstdint>
#include <random>

namespace rbfd {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer; a bijective 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed of sub-stream `stream` under `root`. Distinct (root, stream) pairs give
/// unrelated seeds, so run i of a batch never shares a stream with run j.
constexpr std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream) noexcept {
  return mix64(mix64(root) ^ mix64(stream + 0x632be59bd9b4e019ULL));
}

inline Rng make_rng(std::uint64_t root, std::uint64_t stream) { return Rng(derive_seed(root, stream)); }

/// Stream ids used by the generators and the optimizer.
namespace streams {
inline constexpr std::uint64_t kMatrix = 1;
inline constexpr std::uint64_t kComponent1 = 11;
inline constexpr std::uint64_t kComponent2 = 12;
inline constexpr std::uint64_t kGraph = 21;
inline constexpr std::uint64_t kSurface = 31;
inline constexpr std::uint64_t kNoise = 32;
inline constexpr std::uint64_t kRunBase = 1000;
}  // namespace streams

}  // namespace rbfd
