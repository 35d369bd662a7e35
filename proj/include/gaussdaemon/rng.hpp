#pragma once

#include <cstdint>
#include <random>

namespace gaussdaemon {

/// Random stream type used everywhere randomness is consumed. Streams are
/// always owned and passed explicitly by the caller.
using RngStream = std::mt19937_64;

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed of substream `index` under `master`; distinct indices give
/// decorrelated, reproducible streams.
constexpr std::uint64_t substream_seed(std::uint64_t master, std::uint64_t index) noexcept {
  return mix64(mix64(master) ^ mix64(index + 0x632be59bd9b4e019ULL));
}

inline RngStream make_stream(std::uint64_t master, std::uint64_t index) {
  return RngStream(substream_seed(master, index));
}

}  // namespace gaussdaemon
