#pragma once

#include <cstdint>

namespace hypsel {

/// SplitMix64: tiny, fast, splittable 64-bit generator. We use it both as a
/// stream generator and to derive independent per-trial streams from a master
/// seed, so that experiment results are reproducible across platforms (no
/// dependence on libstdc++ distribution internals).
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform integer in [0, n).
  std::uint64_t next_below(std::uint64_t n) {
    // Rejection-free modulo is fine here: n is tiny relative to 2^64, and the
    // bias (< n/2^64) is far below every tolerance used in this project.
    return next_u64() % n;
  }

  /// Derive an independent stream keyed by (seed of this stream, index).
  static SplitMix64 derive(std::uint64_t master_seed, std::uint64_t index) {
    SplitMix64 mixer(master_seed ^ (0x632be59bd9b4e019ULL * (index + 1)));
    mixer.next_u64();
    return SplitMix64(mixer.next_u64());
  }

 private:
  std::uint64_t state_;
};

}  // namespace hypsel
