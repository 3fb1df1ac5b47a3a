#include "wavecheck/rng.hpp"

#include <cmath>

namespace wavecheck {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t Rng::below(std::uint64_t n) {
  if (n <= 1) return 0;
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t v = u64();
  while (v >= limit) v = u64();
  return v % n;
}

double Rng::normal() {
  // Box-Muller; u1 bounded away from 0 so log stays finite.
  double u1 = uniform();
  while (u1 <= 0x1.0p-53) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
}

Rng Rng::split(std::uint64_t stream) const {
  return Rng(mix64(seed_value_ ^ mix64(stream + 0x5851f42d4c957f2dULL)));
}

}  // namespace wavecheck
