#pragma once

#include <cstdint>

namespace motion_barcode {

// Counter-based random numbers keyed on (seed, x, y, t, stream). Every draw is
// a pure function of its key, so results do not depend on iteration order.

constexpr std::uint64_t splitmix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t x, std::uint64_t y,
                                     std::uint64_t t, std::uint64_t stream) noexcept {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ x);
  h = splitmix64(h ^ (y + 0x632be59bd9b4e019ULL));
  h = splitmix64(h ^ (t + 0x8cb92ba72f3d8dd7ULL));
  return splitmix64(h ^ (stream + 0xd6e8feb86659fd93ULL));
}

/// Maps a 64-bit hash to [0, n) by multiply-high.
constexpr std::uint32_t hash_below(std::uint64_t h, std::uint32_t n) noexcept {
  const std::uint64_t lo = (h & 0xffffffffULL) * n;
  const std::uint64_t hi = (h >> 32) * n;
  return static_cast<std::uint32_t>((hi + (lo >> 32)) >> 32);
}

/// Maps a 64-bit hash to [0, 1) with 53 bits of precision.
constexpr double hash_unit(std::uint64_t h) noexcept {
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

}  // namespace motion_barcode
