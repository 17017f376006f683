// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <random>

namespace partsim {

/// Seeded random stream. Copying the state and replaying it reproduces the
/// same draws. Only the engine output is used (it is fully specified by the
/// standard); the mapping to ranges is done here so streams are identical
/// across standard library implementations.
class RngState {
 public:
  explicit RngState(std::uint64_t seed = 0) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next() { return engine_(); }

  /// Uniform double in [0, 1) with 53 bits of precision.
  double uniform01();

  /// Uniform integer in [lo, hi] (inclusive). Requires lo <= hi.
  std::uint64_t uniform_int(std::uint64_t lo, std::uint64_t hi);

  /// True with probability p (p clamped to [0, 1]). Always consumes a draw.
  bool bernoulli(double p);

  /// Derives an independent stream seed, e.g. for auxiliary generators.
  static std::uint64_t derive(std::uint64_t seed, std::uint64_t stream);

  bool operator==(const RngState& other) const = default;

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace partsim
