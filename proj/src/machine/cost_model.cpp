// SPDX-License-Identifier: Apache-2.0
#include "partsim/machine/cost_model.hpp"

#include <stdexcept>

#include <fmt/core.h>

namespace partsim {

namespace {
void check_probability(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0))
    throw std::invalid_argument(fmt::format("memory.{} {} outside [0,1]", name, p));
}
}  // namespace

void MemCostModel::validate() const {
  check_probability(tlb_miss_prob_1stage, "tlb_miss_prob_1stage");
  check_probability(tlb_miss_prob_2stage, "tlb_miss_prob_2stage");
  check_probability(hugepage_factor, "hugepage_factor");
  if (tlb_miss_prob_2stage < tlb_miss_prob_1stage)
    throw std::invalid_argument("memory.tlb_miss_prob_2stage must be >= tlb_miss_prob_1stage");
}

double MemCostModel::miss_probability(unsigned stages, bool hugepage_gstage) const {
  if (stages < 2) return tlb_miss_prob_1stage;
  return hugepage_gstage ? tlb_miss_prob_2stage * hugepage_factor : tlb_miss_prob_2stage;
}

void CostModel::validate() const {
  memory.validate();
  contention.validate();
}

Cycles mem_access_cost(const MemCostModel& model, const ContentionModel& contention_model,
                       unsigned stages, bool hugepage_gstage, double contention, RngState& rng) {
  if (stages != 1 && stages != 2)
    throw std::invalid_argument(fmt::format("translation stages must be 1 or 2, got {}", stages));
  Cycles cost = model.base_cost;
  const double p = model.miss_probability(stages, hugepage_gstage);
  if (p > 0.0 && rng.bernoulli(p)) cost += stages == 2 ? model.walk_cost_2stage : model.walk_cost_1stage;
  cost += sample_contention(contention, rng, contention_model);
  return cost;
}

}  // namespace partsim
