#pragma once

#include <cstdint>
#include <span>

// Counted-stream pseudo-random generator with explicit state threading.
// splitmix64 is used instead of <random> engines/distributions because the
// standard distributions are implementation-defined; traces must be
// bit-identical across platforms.

namespace edas {

class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) with 53 random bits.
  double next_unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // One categorical draw; probabilities must sum to ~1. Rounding slack in
  // the cumulative walk falls to the last index.
  std::size_t categorical(std::span<const double> probabilities) {
    const double u = next_unit();
    double cumulative = 0.0;
    for (std::size_t i = 0; i + 1 < probabilities.size(); ++i) {
      cumulative += probabilities[i];
      if (u < cumulative) return i;
    }
    return probabilities.empty() ? 0 : probabilities.size() - 1;
  }

 private:
  std::uint64_t state_;
};

}  // namespace edas
