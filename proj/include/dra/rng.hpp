#pragma once

#include <cstdint>

namespace dra {

// Deterministic 64-bit PRNG (splitmix64, Steele et al.). Scenario generation
// and seeded initialization must reproduce bit-exactly across platforms, so
// all randomness in the library flows through this generator rather than
// <random>, whose distributions are implementation-defined.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1), 53-bit resolution.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  // Uniform integer in [lo, hi], inclusive. Modulo bias is negligible for the
  // ranges used here (< 2^20 out of 2^64).
  int uniform_int(int lo, int hi) {
    return lo + static_cast<int>(next_u64() % static_cast<std::uint64_t>(hi - lo + 1));
  }

  // Independent child seed for stream `index`; used when a generator has to
  // resample without disturbing the parent sequence.
  static std::uint64_t derive(std::uint64_t seed, std::uint64_t index) {
    SplitMix64 g(seed ^ (0xD1B54A32D192ED03ULL * (index + 1)));
    return g.next_u64();
  }

 private:
  std::uint64_t state_;
};

}  // namespace dra
