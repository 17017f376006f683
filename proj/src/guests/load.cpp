// SPDX-License-Identifier: Apache-2.0
#include "partsim/guests/load.hpp"

#include <stdexcept>

#include <fmt/core.h>

namespace partsim {

void LoadConfig::validate() const {
  if (!(intensity >= 0.0 && intensity <= 1.0))
    throw std::invalid_argument(fmt::format("load intensity {} outside [0,1]", intensity));
  if (period == 0) throw std::invalid_argument("load period must be positive");
}

LoadGenerator::LoadGenerator(Platform& platform, HartMask harts, LoadConfig config, std::uint64_t seed)
    : platform_(platform), harts_(harts), config_(config), rng_(RngState::derive(seed, 0x10ad)) {
  config_.validate();
  if (harts_.empty()) throw std::invalid_argument("load generator needs at least one hart");
  if (!harts_.subset_of(HartMask::first(platform_.machine().size())))
    throw std::invalid_argument("load hart does not exist");
}

void LoadGenerator::start() {
  platform_.set_contention(config_.intensity);
  for (HartId h : harts_.to_vector()) platform_.queue().schedule(platform_.now() + config_.period, {Target::Load, 0, h, 0});
}

void LoadGenerator::on_event(const Event& event) {
  const HartId h = event.action.hart;
  const CostModel& costs = platform_.costs();
  const Translation& tr = platform_.translation(h);
  Cycles spent = 0;
  for (unsigned i = 0; i < config_.accesses; ++i)
    spent += mem_access_cost(costs.memory, costs.contention, tr.stages, tr.hugepage_gstage, platform_.contention(), rng_);
  platform_.machine().hart(h).busy_cycles += spent;
  traffic_cycles_ += spent;
  ++bursts_;
  platform_.queue().schedule(platform_.now() + config_.period, {Target::Load, 0, h, 0});
}

}  // namespace partsim
