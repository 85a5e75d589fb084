// Copyright 2026 The rkmf Authors.
// SPDX-License-Identifier: Apache-2.0
#ifndef RKMF_RNG_HPP
#define RKMF_RNG_HPP

#include <cmath>
#include <cstdint>

namespace rkmf {

// SplitMix64 (Steele/Lea/Flood). Counter-based: state advances by a fixed
// odd constant and the output is a bijective mix of the state, so streams
// can be split by seeding sub-generators from derived seeds. Chosen over
// <random> engines+distributions because the standard library does not pin
// distribution algorithms and the artifact promises byte-reproducible output
// for a given seed on any platform.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1): 53 random bits.
  double next_unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [0, bound) by rejection (unbiased).
  std::uint64_t next_below(std::uint64_t bound) {
    const std::uint64_t limit = bound * (UINT64_MAX / bound);
    std::uint64_t v;
    do {
      v = next_u64();
    } while (v >= limit);
    return v % bound;
  }

  bool next_sign() { return (next_u64() & 1ULL) != 0; }

  // N(mean, sd^2) via Box-Muller (one value per call; the twin is dropped to
  // keep the stream position independent of call pairing).
  double next_gaussian(double mean, double sd) {
    double u1 = next_unit();
    while (u1 <= 0.0) u1 = next_unit();
    const double u2 = next_unit();
    const double r = std::sqrt(-2.0 * std::log(u1));
    return mean + sd * r * std::cos(6.283185307179586476925286766559 * u2);
  }

  // Derive an independent stream for substream `tag` of `seed`.
  static std::uint64_t derive(std::uint64_t seed, std::uint64_t tag) {
    SplitMix64 g(seed ^ (0xA0761D6478BD642FULL + tag * 0xE7037ED1A0B428DBULL));
    return g.next_u64();
  }

 private:
  std::uint64_t state_;
};

}  // namespace rkmf

#endif  // RKMF_RNG_HPP
