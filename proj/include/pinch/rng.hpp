// SPDX-License-Identifier: Apache-2.0
// Counter-based random numbers: every value is a pure function of (seed, stream, counter).
#pragma once

#include <complex>
#include <cstdint>

namespace pinch {

inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline std::uint64_t counter_bits(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
  std::uint64_t h = splitmix64(seed ^ 0x6A09E667F3BCC909ULL);
  h = splitmix64(h ^ stream);
  return splitmix64(h ^ (counter * 0xD1B54A32D192ED03ULL));
}

// Uniform on (0, 1], never zero so logs are safe.
inline double counter_uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
  return (static_cast<double>(counter_bits(seed, stream, counter) >> 11) + 1.0) * 0x1.0p-53;
}

// Circularly-symmetric complex normal with unit variance.
inline std::complex<double> counter_cnormal(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  const double u1 = counter_uniform(seed, stream, 2 * index);
  const double u2 = counter_uniform(seed, stream, 2 * index + 1);
  const double r = std::sqrt(-std::log(u1));
  const double a = 6.283185307179586 * u2;
  return {r * std::cos(a), r * std::sin(a)};
}

}  // namespace pinch
