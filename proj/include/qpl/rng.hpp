#pragma once

// Counter-based pseudo-random numbers: draw i of stream s under seed k is a
// pure function of (k, s, i), so parallel samplers are reproducible
// independently of thread count and scheduling.

#include <cstdint>

namespace qpl {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t seed() const { return seed_; }

  /// 64 random bits for (stream, index).
  std::uint64_t bits(std::uint64_t stream, std::uint64_t index) const {
    return splitmix64(splitmix64(seed_ ^ splitmix64(stream)) + index);
  }

  /// Uniform integer in [lo, hi], unbiased (rejection on sub-counters).
  std::int64_t uniform(std::uint64_t stream, std::uint64_t index, std::int64_t lo, std::int64_t hi) const {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    if (span == 0) return static_cast<std::int64_t>(bits(stream, index));
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
    for (std::uint64_t j = 0;; ++j) {
      const std::uint64_t r = splitmix64(bits(stream, index) + j * 0x632be59bd9b4e019ULL);
      if (r < limit) return lo + static_cast<std::int64_t>(r % span);
    }
  }

 private:
  std::uint64_t seed_;
};

}  // namespace qpl
