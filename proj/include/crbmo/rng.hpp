// SPDX-License-Identifier: Apache-2.0
//
// Deterministic random streams for reproducible experiments. All draws go
// through explicitly seeded generators; substreams are derived from
// (seed, tag...) so independent pieces of a run never share state.

#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace crbmo {

/// SplitMix64 step; used to mix seeds and derive substream keys.
uint64_t splitmix64(uint64_t x);

/// Deterministic random stream. Canonical uniform/normal construction is
/// hand-rolled from raw 64-bit outputs so results do not depend on the
/// standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(splitmix64(seed)) {}

  /// Substream keyed by (seed, a, b, c); streams with different keys are
  /// statistically independent.
  static Rng stream(uint64_t seed, uint64_t a, uint64_t b = 0, uint64_t c = 0);

  uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1).
  double uniform01();

  /// Uniform on [lo, hi).
  double uniform(double lo, double hi);

  /// Standard normal (Box-Muller; one cached value).
  double normal();

  /// Circularly symmetric complex normal CN(0, variance).
  std::complex<double> complex_normal(double variance);

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace crbmo
