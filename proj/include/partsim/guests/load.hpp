// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>

#include "partsim/machine/platform.hpp"

namespace partsim {

struct LoadConfig {
  double intensity = 1.0;
  /// Cycles between memory-traffic bursts on each load hart.
  Cycles period = 10000;
  /// Accesses per burst.
  unsigned accesses = 4;

  void validate() const;
};

/// Neighbour-domain traffic on root-cell harts. Sets the global contention
/// level for the run and keeps the load harts busy with periodic memory
/// accesses. Draws from its own random stream so the benchmark's stream is
/// not perturbed.
class LoadGenerator {
 public:
  LoadGenerator(Platform& platform, HartMask harts, LoadConfig config, std::uint64_t seed);

  /// Applies the contention level and schedules the first burst per hart.
  void start();
  void on_event(const Event& event);

  std::uint64_t bursts() const { return bursts_; }
  Cycles traffic_cycles() const { return traffic_cycles_; }
  HartMask harts() const { return harts_; }

 private:
  Platform& platform_;
  HartMask harts_;
  LoadConfig config_;
  RngState rng_;
  std::uint64_t bursts_ = 0;
  Cycles traffic_cycles_ = 0;
};

}  // namespace partsim
