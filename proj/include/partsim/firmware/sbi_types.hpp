// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string_view>

#include "partsim/machine/hart.hpp"
#include "partsim/machine/mmio.hpp"
#include "partsim/sim/time.hpp"

namespace partsim {

enum class SbiFunction : std::uint8_t { SetTimer, SendIpi, Rfence, HartStart, HartStop };

std::string_view to_string(SbiFunction function);

/// One SBI call. `mask` is used by send_ipi and rfence, `deadline` by
/// set_timer and `target` by hart_start / hart_stop.
struct SbiCall {
  SbiFunction function = SbiFunction::Rfence;
  HartId caller = 0;
  HartMask mask;
  SimTime deadline;
  HartId target = 0;

  static SbiCall set_timer(HartId caller, SimTime deadline) {
    return {SbiFunction::SetTimer, caller, {}, deadline, 0};
  }
  static SbiCall send_ipi(HartId caller, HartMask mask) { return {SbiFunction::SendIpi, caller, mask, {}, 0}; }
  static SbiCall rfence(HartId caller, HartMask mask) { return {SbiFunction::Rfence, caller, mask, {}, 0}; }
  static SbiCall hart_start(HartId caller, HartId target) {
    return {SbiFunction::HartStart, caller, {}, {}, target};
  }
  static SbiCall hart_stop(HartId caller, HartId target) {
    return {SbiFunction::HartStop, caller, {}, {}, target};
  }
};

using SbiStatus = OpStatus;

struct SbiOutcome {
  SbiStatus status = SbiStatus::Ok;
  Cycles cycles = 0;
};

}  // namespace partsim
