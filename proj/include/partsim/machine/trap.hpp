// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <variant>

#include "partsim/machine/hart.hpp"
#include "partsim/machine/privilege.hpp"
#include "partsim/sim/time.hpp"

namespace partsim {

enum class Exception : std::uint8_t {
  EcallFromVS,     // guest SBI call, lands in HS
  EcallFromS,      // SBI call from HS or bare-metal S, lands in M
  GuestMmioFault,  // guest access to a page it does not own exclusively, lands in HS
};

using TrapCause = std::variant<Interrupt, Exception>;

std::string to_string(Exception e);
std::string to_string(const TrapCause& cause);

/// Mode that handles a synchronous exception.
constexpr PrivilegeMode exception_target(Exception e) {
  return e == Exception::EcallFromS ? PrivilegeMode::M : PrivilegeMode::HS;
}

struct TrapRecord {
  HartId hart = 0;
  TrapCause cause = Interrupt{};
  PrivilegeMode from_mode = PrivilegeMode::U;
  PrivilegeMode to_mode = PrivilegeMode::M;
  SimTime entry_time;
  SimTime exit_time;
  /// Guest supervisor interrupt enable before a same-level trap (restored on return).
  bool prior_supervisor_ie = false;

  bool is_interrupt() const { return std::holds_alternative<Interrupt>(cause); }
};

}  // namespace partsim
