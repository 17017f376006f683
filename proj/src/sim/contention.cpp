// SPDX-License-Identifier: Apache-2.0
#include "partsim/sim/contention.hpp"

#include <cmath>
#include <stdexcept>

#include <fmt/core.h>

namespace partsim {

void ContentionModel::validate() const {
  if (!(p_hit >= 0.0 && p_hit <= 1.0))
    throw std::invalid_argument(fmt::format("contention.p_hit {} outside [0,1]", p_hit));
  if (min_tail > max_tail)
    throw std::invalid_argument(
        fmt::format("contention.min_tail {} > max_tail {}", min_tail, max_tail));
}

Cycles sample_contention(double level, RngState& rng, const ContentionModel& model) {
  if (!(level >= 0.0 && level <= 1.0))
    throw std::invalid_argument(fmt::format("contention level {} outside [0,1]", level));
  if (level == 0.0) return 0;
  const bool tail = rng.bernoulli(model.p_hit);
  const Cycles draw = tail ? rng.uniform_int(model.min_tail, model.max_tail)
                           : rng.uniform_int(0, model.small_bound);
  return static_cast<Cycles>(std::floor(level * static_cast<double>(draw)));
}

}  // namespace partsim
