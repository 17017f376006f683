// SPDX-License-Identifier: Apache-2.0
#include "partsim/machine/machine.hpp"

#include <numeric>
#include <stdexcept>

#include <fmt/core.h>

namespace partsim {

std::uint64_t PendingConservation::total_rises() const {
  return std::accumulate(rises.begin(), rises.end(), std::uint64_t{0});
}
std::uint64_t PendingConservation::total_falls() const {
  return std::accumulate(falls.begin(), falls.end(), std::uint64_t{0});
}
std::uint64_t PendingConservation::total_redundant() const {
  return std::accumulate(redundant_sets.begin(), redundant_sets.end(), std::uint64_t{0});
}

std::string to_string(Exception e) {
  switch (e) {
    case Exception::EcallFromVS: return "ecall-from-VS";
    case Exception::EcallFromS: return "ecall-from-S";
    case Exception::GuestMmioFault: return "guest-mmio-fault";
  }
  return "?";
}

std::string to_string(const TrapCause& cause) {
  if (const auto* irq = std::get_if<Interrupt>(&cause)) return to_string(*irq);
  return to_string(std::get<Exception>(cause));
}

Machine::Machine(unsigned hart_count, bool virtualized)
    : virtualized_(virtualized), drivers_(hart_count) {
  if (hart_count == 0 || hart_count > kMaxHarts)
    throw std::invalid_argument(fmt::format("hart count {} outside [1,{}]", hart_count, kMaxHarts));
  harts_.resize(hart_count);
  for (HartId i = 0; i < hart_count; ++i) {
    Hart& h = harts_[i];
    h.id = i;
    h.mode = guest_mode();
    h.delegation = virtualized ? Delegation::virtualized() : Delegation::bare_metal();
    for (auto& d : drivers_[i]) d = 0;
  }
}

Hart& Machine::hart(HartId id) {
  if (id >= harts_.size()) throw std::out_of_range(fmt::format("hart {} does not exist", id));
  return harts_[id];
}

const Hart& Machine::hart(HartId id) const {
  if (id >= harts_.size()) throw std::out_of_range(fmt::format("hart {} does not exist", id));
  return harts_[id];
}

void Machine::notify(HartId hart) {
  if (listener_) listener_(hart);
}

void Machine::refresh(HartId hart_id, Interrupt irq) {
  Hart& h = hart(hart_id);
  const bool level = drivers_[hart_id][irq.bit()] != 0;
  const bool was = h.pending.test(irq);
  if (level == was) return;
  h.pending.set(irq, level);
  if (level)
    ++conservation_.rises[irq.bit()];
  else
    ++conservation_.falls[irq.bit()];
  notify(hart_id);
}

void Machine::set_pending(HartId hart_id, Interrupt irq) {
  auto& d = drivers_.at(hart_id)[irq.bit()];
  const auto sw = static_cast<std::uint8_t>(1u << static_cast<unsigned>(IrqDriver::Software));
  if (d & sw) ++conservation_.redundant_sets[irq.bit()];
  d |= sw;
  refresh(hart_id, irq);
}

void Machine::clear_pending(HartId hart_id, Interrupt irq) {
  auto& d = drivers_.at(hart_id)[irq.bit()];
  d &= static_cast<std::uint8_t>(~(1u << static_cast<unsigned>(IrqDriver::Software)));
  refresh(hart_id, irq);
}

void Machine::set_line(HartId hart_id, Interrupt irq, IrqDriver driver, bool level) {
  auto& d = drivers_.at(hart_id)[irq.bit()];
  const auto mask = static_cast<std::uint8_t>(1u << static_cast<unsigned>(driver));
  d = level ? static_cast<std::uint8_t>(d | mask) : static_cast<std::uint8_t>(d & ~mask);
  refresh(hart_id, irq);
}

void Machine::set_enabled(HartId hart_id, Interrupt irq, bool enabled) {
  Hart& h = hart(hart_id);
  if (h.enable.test(irq) == enabled) return;
  h.enable.set(irq, enabled);
  notify(hart_id);
}

Interrupt Machine::assert_interrupt(HartId hart_id, IrqType type) {
  const Interrupt irq{type, type == IrqType::External ? IrqLevel::S : IrqLevel::M};
  set_pending(hart_id, irq);
  return irq;
}

std::optional<Interrupt> Machine::next_eligible(HartId hart_id) const {
  const Hart& h = hart(hart_id);
  const IrqSet active = h.pending & h.enable;
  if (!active.any()) return std::nullopt;
  for (Interrupt irq : irq::kPriorityOrder) {
    if (!active.test(irq)) continue;
    const PrivilegeMode target = h.delegation.route(irq);
    if (more_privileged(target, h.mode)) return irq;
    const bool guest_level = target == PrivilegeMode::VS || target == PrivilegeMode::S;
    if (target == h.mode && guest_level && h.supervisor_ie) return irq;
  }
  return std::nullopt;
}

TrapRecord Machine::enter(HartId hart_id, TrapCause cause, PrivilegeMode to, SimTime now) {
  Hart& h = hart(hart_id);
  TrapRecord rec;
  rec.hart = hart_id;
  rec.cause = cause;
  rec.from_mode = h.mode;
  rec.to_mode = to;
  rec.entry_time = now;
  rec.exit_time = now;
  rec.prior_supervisor_ie = h.supervisor_ie;
  if (to == PrivilegeMode::VS || to == PrivilegeMode::S) h.supervisor_ie = false;
  h.mode = to;
  ++entries_[static_cast<int>(to)];
  return rec;
}

TrapRecord Machine::take_trap(HartId hart_id, SimTime now) {
  const auto irq = next_eligible(hart_id);
  if (!irq) throw SpuriousTrap(fmt::format("spurious trap on hart {}", hart_id));
  return enter(hart_id, *irq, hart(hart_id).delegation.route(*irq), now);
}

TrapRecord Machine::raise_exception(HartId hart_id, Exception e, SimTime now) {
  const PrivilegeMode from = hart(hart_id).mode;
  const PrivilegeMode to = exception_target(e);
  if (!more_privileged(to, from)) {
    throw SimulationError(fmt::format("{} raised in {} on hart {}", to_string(e), to_string(from),
                                      hart_id));
  }
  return enter(hart_id, e, to, now);
}

void Machine::trap_return(HartId hart_id, TrapRecord& record, SimTime now) {
  Hart& h = hart(hart_id);
  if (h.mode != record.to_mode)
    throw SimulationError(fmt::format("trap return on hart {} from {} but record says {}", hart_id,
                                      to_string(h.mode), to_string(record.to_mode)));
  h.mode = record.from_mode;
  if (record.to_mode == PrivilegeMode::VS || record.to_mode == PrivilegeMode::S)
    h.supervisor_ie = record.prior_supervisor_ie;
  record.exit_time = now;
  notify(hart_id);
}

}  // namespace partsim
