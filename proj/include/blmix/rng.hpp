#pragma once

#include <cstdint>

namespace blmix {

// splitmix64 (Steele/Lea/Vigna). Small, fast, and fully portable: identical
// streams on every platform, which keeps seeded Monte Carlo runs reproducible.
struct SplitMix64 {
  std::uint64_t state = 0;

  explicit SplitMix64(std::uint64_t seed) : state(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // uniform in [0, 1) with 53 random bits
  double uniform01() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }
};

// Trial i draws from the stream seeded seed^i, so trials are independent of
// scheduling order and can run in parallel.
inline SplitMix64 trial_stream(std::uint64_t seed, std::uint64_t trial) {
  return SplitMix64(seed ^ trial);
}

}  // namespace blmix
