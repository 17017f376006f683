// SPDX-License-Identifier: Apache-2.0
#include "partsim/machine/privilege.hpp"

#include <stdexcept>

#include <fmt/core.h>

namespace partsim {

std::string_view to_string(PrivilegeMode mode) {
  switch (mode) {
    case PrivilegeMode::U: return "U";
    case PrivilegeMode::VS: return "VS";
    case PrivilegeMode::S: return "S-bare";
    case PrivilegeMode::HS: return "HS";
    case PrivilegeMode::M: return "M";
  }
  return "?";
}

std::optional<PrivilegeMode> parse_privilege(std::string_view text) {
  if (text == "U") return PrivilegeMode::U;
  if (text == "VS") return PrivilegeMode::VS;
  if (text == "S" || text == "S-bare") return PrivilegeMode::S;
  if (text == "HS") return PrivilegeMode::HS;
  if (text == "M") return PrivilegeMode::M;
  return std::nullopt;
}

std::string_view to_string(IrqType type) {
  switch (type) {
    case IrqType::Software: return "software";
    case IrqType::Timer: return "timer";
    case IrqType::External: return "external";
  }
  return "?";
}

std::string_view to_string(IrqLevel level) {
  switch (level) {
    case IrqLevel::S: return "S";
    case IrqLevel::VS: return "VS";
    case IrqLevel::M: return "M";
  }
  return "?";
}

std::string to_string(Interrupt irq) {
  return fmt::format("{}-{}", to_string(irq.level), to_string(irq.type));
}

Delegation::Delegation(bool virtualized) : virtualized_(virtualized) {
  const PrivilegeMode supervisor = virtualized ? PrivilegeMode::HS : PrivilegeMode::S;
  const PrivilegeMode guest = virtualized ? PrivilegeMode::VS : PrivilegeMode::S;
  routes_.fill(PrivilegeMode::M);
  for (Interrupt irq : irq::kPriorityOrder) {
    switch (irq.level) {
      case IrqLevel::M: routes_[irq.bit()] = PrivilegeMode::M; break;
      case IrqLevel::S: routes_[irq.bit()] = supervisor; break;
      case IrqLevel::VS: routes_[irq.bit()] = guest; break;
    }
  }
}

Delegation Delegation::virtualized() { return Delegation(true); }
Delegation Delegation::bare_metal() { return Delegation(false); }

void Delegation::set_route(Interrupt irq, PrivilegeMode mode) {
  const PrivilegeMode supervisor = virtualized_ ? PrivilegeMode::HS : PrivilegeMode::S;
  bool ok = false;
  switch (irq.level) {
    case IrqLevel::M: ok = mode == PrivilegeMode::M; break;
    case IrqLevel::S: ok = mode == supervisor; break;
    case IrqLevel::VS:
      ok = mode == supervisor || mode == (virtualized_ ? PrivilegeMode::VS : PrivilegeMode::S);
      break;
  }
  if (!ok) {
    throw std::invalid_argument(
        fmt::format("cannot route {} to {}", to_string(irq), to_string(mode)));
  }
  routes_[irq.bit()] = mode;
}

}  // namespace partsim
