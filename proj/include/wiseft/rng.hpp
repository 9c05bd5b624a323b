// SPDX-License-Identifier: Apache-2.0
//
// Seeded random streams. Every distribution is hand-rolled on top of
// std::mt19937_64 (whose output sequence the standard fully specifies), so
// identical seeds give identical draws on every platform. Substreams are
// derived by hashing (seed, tag, index), which lets independent work items
// draw independently of scheduling.

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string_view>

namespace wiseft {

namespace detail {
inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}
}  // namespace detail

// Derives an independent substream seed from a root seed plus a tag and index.
inline uint64_t substream_seed(uint64_t root, std::string_view tag, uint64_t index = 0) {
  uint64_t h = detail::splitmix64(root);
  for (char c : tag) h = detail::splitmix64(h ^ static_cast<uint8_t>(c));
  return detail::splitmix64(h ^ index);
}

class Rng {
 public:
  explicit Rng(uint64_t seed) : eng_(seed) {}

  uint64_t next_u64() { return eng_(); }

  // Uniform in [0,1) with 53 random bits.
  double uniform() {
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Unbiased integer in [0, n) by rejection.
  uint64_t uniform_int(uint64_t n) {
    const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    uint64_t v;
    do {
      v = eng_();
    } while (v >= limit);
    return v % n;
  }

  // Standard normal via Box-Muller; the second variate is discarded so each
  // call consumes exactly two uniforms.
  double normal() {
    double u1 = uniform();
    while (u1 == 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  // Uniform rotation on SO(3) from a Shoemake-uniform quaternion,
  // returned as a row-major 3x3 matrix.
  std::array<double, 9> rotation() {
    const double u1 = uniform();
    const double u2 = uniform();
    const double u3 = uniform();
    const double two_pi = 2.0 * std::numbers::pi;
    const double x = std::sqrt(1.0 - u1) * std::sin(two_pi * u2);
    const double y = std::sqrt(1.0 - u1) * std::cos(two_pi * u2);
    const double z = std::sqrt(u1) * std::sin(two_pi * u3);
    const double w = std::sqrt(u1) * std::cos(two_pi * u3);
    return {1 - 2 * (y * y + z * z), 2 * (x * y - z * w),     2 * (x * z + y * w),
            2 * (x * y + z * w),     1 - 2 * (x * x + z * z), 2 * (y * z - x * w),
            2 * (x * z - y * w),     2 * (y * z + x * w),     1 - 2 * (x * x + y * y)};
  }

  // Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      const size_t j = static_cast<size_t>(uniform_int(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace wiseft
