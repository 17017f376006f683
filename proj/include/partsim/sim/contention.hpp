// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "partsim/sim/rng.hpp"
#include "partsim/sim/time.hpp"

namespace partsim {

/// Bounded heavy-tailed mixture for shared-bus interference caused by load in
/// a neighbouring domain. With probability `p_hit` a draw is uniform in
/// [min_tail, max_tail], otherwise uniform in [0, small_bound]. The result is
/// scaled by the contention level.
struct ContentionModel {
  double p_hit = 0.05;
  Cycles small_bound = 16;
  Cycles min_tail = 2000;
  Cycles max_tail = 8000;

  /// Throws std::invalid_argument on inconsistent parameters.
  void validate() const;
};

/// Extra cycles for one access under contention `level` in [0, 1]. Level 0
/// returns 0 without consuming randomness. Throws std::invalid_argument for a
/// level outside [0, 1].
Cycles sample_contention(double level, RngState& rng, const ContentionModel& model = {});

}  // namespace partsim
