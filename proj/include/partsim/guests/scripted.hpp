// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "partsim/devices/bus.hpp"
#include "partsim/machine/platform.hpp"

namespace partsim {

/// One step of a scripted guest.
struct ScriptedAction {
  enum class Kind : std::uint8_t { Sbi, MmioRead, MmioWrite };
  Kind kind = Kind::Sbi;
  SbiCall call;
  Addr addr = 0;
  Word value = 0;
  std::string label;
};

/// Runs a fixed list of SBI calls and MMIO accesses in order and records
/// each outcome.
class ScriptedGuest : public GuestProgram {
 public:
  explicit ScriptedGuest(std::vector<ScriptedAction> actions) : actions_(std::move(actions)) {}

  void boot(HartContext& ctx) override;
  void on_trap(HartContext& ctx, const TrapRecord& record) override;

  const std::vector<ScriptedAction>& actions() const { return actions_; }
  const std::vector<OpResult>& outcomes() const { return outcomes_; }
  bool done() const { return outcomes_.size() == actions_.size(); }

 private:
  std::vector<ScriptedAction> actions_;
  std::vector<OpResult> outcomes_;
};

/// Resources the adversary may not touch.
struct ForeignResources {
  HartMask harts;
  std::set<SourceId> sources;
};

/// Random cross-cell attempts from `self`: SBI calls naming foreign harts,
/// hart start/stop, foreign PLIC/APLIC registers, foreign IMSIC files and
/// the hypervisor-only timer, doorbell and M/S-level files. Every action
/// touches something outside the guest's own cell, so each must be denied.
std::vector<ScriptedAction> adversarial_actions(const DeviceBus& bus, HartId self, HartMask own_harts,
                                                const ForeignResources& foreign, std::size_t count, RngState& rng);

}  // namespace partsim
