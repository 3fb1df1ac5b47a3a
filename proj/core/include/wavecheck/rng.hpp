#pragma once

#include <cstdint>
#include <random>

namespace wavecheck {

// Seeded random source.  All draws go through explicit algorithms on top of
// the mt19937_64 word stream, so a given seed produces the same values on
// every platform (std::uniform_int_distribution and std::normal_distribution
// are implementation-defined and are deliberately avoided).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_value_(seed), eng_(seed) {}

  std::uint64_t u64() { return eng_(); }

  // Uniform in [0, 1).  53-bit mantissa.
  double uniform() { return static_cast<double>(u64() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n).  Rejection to kill modulo bias.
  std::uint64_t below(std::uint64_t n);

  // Standard normal via Box-Muller on explicit uniforms (no cached state).
  double normal();

  // Child stream: decorrelated engine for an independent purpose.
  Rng split(std::uint64_t stream) const;

  std::uint64_t seed() const { return seed_value_; }

 private:
  std::uint64_t seed_value_;
  std::mt19937_64 eng_;
};

// SplitMix64 mixing step; used to derive child seeds.
std::uint64_t mix64(std::uint64_t x);

}  // namespace wavecheck
