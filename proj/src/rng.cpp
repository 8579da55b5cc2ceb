// SPDX-License-Identifier: Apache-2.0

#include "crbmo/rng.hpp"

#include <cmath>
#include <numbers>

namespace crbmo {

uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Rng Rng::stream(uint64_t seed, uint64_t a, uint64_t b, uint64_t c) {
  uint64_t k = splitmix64(seed);
  k = splitmix64(k ^ (a + 0x632be59bd9b4e019ULL));
  k = splitmix64(k ^ (b + 0x9e3779b97f4a7c15ULL));
  k = splitmix64(k ^ (c + 0xd1b54a32d192ed03ULL));
  Rng r(0);
  r.engine_.seed(k);
  return r;
}

double Rng::uniform01() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

double Rng::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  // u1 in (0, 1] so the log is finite
  const double u1 = (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
  const double u2 = uniform01();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double arg = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(arg);
  have_spare_ = true;
  return r * std::cos(arg);
}

std::complex<double> Rng::complex_normal(double variance) {
  const double s = std::sqrt(variance / 2.0);
  const double re = normal();
  const double im = normal();
  return {s * re, s * im};
}

}  // namespace crbmo
