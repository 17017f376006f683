// SPDX-License-Identifier: Apache-2.0
#include "partsim/firmware/firmware.hpp"

#include <numeric>

#include <fmt/core.h>

namespace partsim {

std::uint64_t FirmwareCounters::total_calls() const {
  return std::accumulate(calls.begin(), calls.end(), std::uint64_t{0});
}

Firmware::Firmware(Platform& platform, DeviceBus& bus)
    : platform_(platform), bus_(bus), started_(platform.machine().size(), true) {}

void Firmware::boot() {
  Machine& m = platform_.machine();
  for (HartId h = 0; h < m.size(); ++h) {
    m.set_enabled(h, irq::kMti, true);
    m.set_enabled(h, irq::kMsi, true);
  }
}

bool Firmware::valid_mask(HartMask mask) const {
  return mask.subset_of(HartMask::first(platform_.machine().size()));
}

SbiOutcome Firmware::sbi_set_timer(HartId caller, SimTime deadline) {
  ++counters_.calls[static_cast<std::size_t>(SbiFunction::SetTimer)];
  platform_.machine().clear_pending(caller, irq::kSti);
  bus_.clint().set_mtimecmp(caller, deadline);
  return {SbiStatus::Ok, platform_.costs().sbi_cost + platform_.costs().mmio_base_cost};
}

SbiOutcome Firmware::sbi_send_ipi(HartId, HartMask mask) {
  ++counters_.calls[static_cast<std::size_t>(SbiFunction::SendIpi)];
  if (!valid_mask(mask)) return {SbiStatus::Invalid, platform_.costs().sbi_cost};
  for (HartId h : mask.to_vector()) bus_.clint().set_msip(h, true);
  return {SbiStatus::Ok,
          platform_.costs().sbi_cost + platform_.costs().mmio_base_cost * static_cast<Cycles>(mask.count())};
}

SbiOutcome Firmware::sbi_rfence(HartId, HartMask mask) {
  ++counters_.calls[static_cast<std::size_t>(SbiFunction::Rfence)];
  if (!valid_mask(mask)) return {SbiStatus::Invalid, platform_.costs().sbi_cost};
  return {SbiStatus::Ok, platform_.costs().sbi_cost};
}

SbiOutcome Firmware::sbi_hart_start(HartId, HartId target) {
  ++counters_.calls[static_cast<std::size_t>(SbiFunction::HartStart)];
  if (target >= started_.size()) return {SbiStatus::Invalid, platform_.costs().sbi_cost};
  started_[target] = true;
  return {SbiStatus::Ok, platform_.costs().sbi_cost};
}

SbiOutcome Firmware::sbi_hart_stop(HartId, HartId target) {
  ++counters_.calls[static_cast<std::size_t>(SbiFunction::HartStop)];
  if (target >= started_.size()) return {SbiStatus::Invalid, platform_.costs().sbi_cost};
  started_[target] = false;
  return {SbiStatus::Ok, platform_.costs().sbi_cost};
}

void Firmware::on_trap(HartContext& ctx, const TrapRecord& record) {
  const HartId h = ctx.hart();
  const CostModel& costs = ctx.costs();
  if (const auto* irq = std::get_if<Interrupt>(&record.cause)) {
    if (*irq == irq::kMti) {
      ++counters_.timer_irqs;
      ctx.local(costs.firmware_irq_cost);
      ctx.mmio_write(bus_.clint_addr(Clint::kMtimecmp + 8 * Addr{h}), SimTime::max().cycles,
                     [](HartContext& c, OpResult) { c.machine().set_pending(c.hart(), irq::kSti); });
      ctx.trap_return();
      return;
    }
    if (*irq == irq::kMsi) {
      ++counters_.software_irqs;
      ctx.local(costs.firmware_irq_cost);
      ctx.mmio_write(bus_.clint_addr(Clint::kMsip + 4 * Addr{h}), 0,
                     [](HartContext& c, OpResult) { c.machine().set_pending(c.hart(), irq::kSsi); });
      ctx.trap_return();
      return;
    }
    throw SimulationError(fmt::format("firmware cannot handle {} on hart {}", to_string(*irq), h));
  }
  if (std::get<Exception>(record.cause) != Exception::EcallFromS)
    throw SimulationError(fmt::format("firmware cannot handle {} on hart {}", to_string(record.cause), h));
  handle_ecall(ctx);
}

void Firmware::handle_ecall(HartContext& ctx) {
  const HartId h = ctx.hart();
  const SbiCall call = ctx.sbi_call();
  ++counters_.calls[static_cast<std::size_t>(call.function)];
  ctx.local(ctx.costs().sbi_cost);
  switch (call.function) {
    case SbiFunction::SetTimer:
      ctx.local(0, [](HartContext& c, OpResult) { c.machine().clear_pending(c.hart(), irq::kSti); });
      ctx.mmio_write(bus_.clint_addr(Clint::kMtimecmp + 8 * Addr{h}), call.deadline.cycles);
      ctx.set_return({});
      break;
    case SbiFunction::SendIpi:
      if (!valid_mask(call.mask)) {
        ctx.set_return(OpResult::invalid());
        break;
      }
      for (HartId t : call.mask.to_vector()) ctx.mmio_write(bus_.clint_addr(Clint::kMsip + 4 * Addr{t}), 1);
      ctx.set_return({});
      break;
    case SbiFunction::Rfence:
      ctx.set_return(valid_mask(call.mask) ? OpResult{} : OpResult::invalid());
      break;
    case SbiFunction::HartStart:
    case SbiFunction::HartStop:
      if (call.target >= started_.size()) {
        ctx.set_return(OpResult::invalid());
        break;
      }
      started_[call.target] = call.function == SbiFunction::HartStart;
      ctx.set_return({});
      break;
  }
  ctx.trap_return();
}

}  // namespace partsim
