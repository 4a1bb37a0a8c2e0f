#pragma once

#include <cstdint>
#include <random>

namespace rispre {

using Rng = std::mt19937_64;

// SplitMix64 finalizer; used to decorrelate (seed, index) pairs.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Named stream domains. A stream is fully determined by (seed, domain, index),
// so per-sample generation can run in any order and still reproduce.
enum class Stream : std::uint64_t {
  channel = 1,
  pilots = 2,
  uplink_noise = 3,
  reference = 4,
  shuffle = 5,
  init = 6,
  eval = 7,
  random_baseline = 8,
};

inline Rng make_stream(std::uint64_t seed, Stream domain, std::uint64_t index = 0) {
  const std::uint64_t a = splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(domain)));
  const std::uint64_t b = splitmix64(a ^ splitmix64(index + 0x632BE59BD9B4E019ULL));
  std::seed_seq seq{static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32),
                    static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32)};
  return Rng(seq);
}

}  // namespace rispre
