// SPDX-License-Identifier: Apache-2.0
#include "partsim/devices/bus.hpp"

#include <stdexcept>

#include <fmt/core.h>

namespace partsim {

void DeviceLayout::validate(unsigned harts) const {
  if (sources < 2 || sources > 1024) throw std::invalid_argument(fmt::format("sources {} outside [2,1024]", sources));
  if (identities < 2 || identities > 64)
    throw std::invalid_argument(fmt::format("identities {} outside [2,64]", identities));
  plic.validate(sources, 2 * harts);
}

DeviceBus::DeviceBus(const DeviceLayout& layout, Machine& machine, std::function<void(SimTime)> clint_wakeup)
    : layout_(layout), machine_(machine) {
  const unsigned harts = machine.size();
  layout_.validate(harts);
  const auto line_for = [&machine](IrqDriver driver) {
    return [&machine, driver](HartId h, Interrupt irq, bool level) { machine.set_line(h, irq, driver, level); };
  };
  clint_ = std::make_unique<Clint>(harts, line_for(IrqDriver::Clint), std::move(clint_wakeup));
  plic_ = std::make_unique<Plic>(harts, layout_.sources, layout_.plic, line_for(IrqDriver::Plic));
  imsic_ = std::make_unique<Imsic>(harts, layout_.identities, layout_.imsic_s_offset, line_for(IrqDriver::Imsic));
  aplic_ = std::make_unique<Aplic>(harts, layout_.sources, imsic_.get(), line_for(IrqDriver::Aplic));
  sswi_ = std::make_unique<Sswi>(harts, [&machine](HartId h) { machine.set_pending(h, irq::kSsi); });

  const auto add = [this](Device* d, Addr base) {
    const Addr length = (d->size() + kPageSize - 1) / kPageSize * kPageSize;
    map_.add_region(Region{base, length, static_cast<std::uint32_t>(devices_.size()), std::string(d->name())});
    devices_.push_back(d);
  };
  add(clint_.get(), layout_.clint_base);
  add(sswi_.get(), layout_.sswi_base);
  add(plic_.get(), layout_.plic_base);
  add(aplic_.get(), layout_.aplic_base);
  add(imsic_.get(), layout_.imsic_base);
  recompute_ownership();
}

std::optional<DeviceBus::Resolved> DeviceBus::resolve(Addr addr) const {
  const Region* r = map_.find(addr);
  if (r == nullptr) return std::nullopt;
  return Resolved{devices_[r->device], addr - r->base};
}

void DeviceBus::recompute_ownership() {
  const auto hart_owner = [this](HartId h) -> std::optional<CellId> {
    if (h >= machine_.size()) return std::nullopt;
    return machine_.hart(h).owner;
  };
  map_.clear_owners();
  for (const Region& r : map_.regions()) {
    const Device* d = devices_[r.device];
    for (Addr page = 0; page < r.length; page += kPageSize) {
      const PageOwner owner = resolve_owner(d->page_scope(page), hart_owner);
      if (owner != PageOwner::hypervisor_only()) map_.set_owner(r.base + page, owner);
    }
  }
}

AccessClass DeviceBus::classify(HartId hart, PrivilegeMode mode, Addr addr) const {
  if (map_.find(addr) == nullptr) return AccessClass::Unmapped;
  if (mode != PrivilegeMode::VS) return AccessClass::Direct;
  const PageOwner owner = map_.owner(addr);
  const auto cell = machine_.hart(hart).owner;
  if (owner.kind == PageOwner::Kind::Cell && cell && owner.cell == *cell) return AccessClass::Direct;
  return AccessClass::GuestFault;
}

OpResult DeviceBus::access(HartId hart, const MmioRequest& request) {
  const auto resolved = resolve(request.addr);
  if (!resolved) return OpResult::denied();
  if (request.is_write()) return resolved->device->write(hart, resolved->offset, request.value);
  return resolved->device->read(hart, resolved->offset);
}

}  // namespace partsim

namespace partsim {

std::string_view to_string(IrqChip chip) {
  switch (chip) {
    case IrqChip::PlicClint: return "plic_clint";
    case IrqChip::AiaDirect: return "aia_direct";
    case IrqChip::AiaMsi: return "aia_msi";
  }
  return "?";
}

std::optional<IrqChip> parse_irqchip(std::string_view text) {
  if (text == "plic_clint" || text == "plic-clint") return IrqChip::PlicClint;
  if (text == "aia_direct" || text == "aia-direct") return IrqChip::AiaDirect;
  if (text == "aia_msi" || text == "aia-msi") return IrqChip::AiaMsi;
  return std::nullopt;
}

}  // namespace partsim

namespace partsim {

void route_wired_source(DeviceBus& bus, IrqChip chip, SourceId source, HartId hart, IrqLevel level,
                        Identity identity) {
  switch (chip) {
    case IrqChip::PlicClint: {
      PlicCore& core = bus.plic().core();
      if (core.priority(source) == 0) core.set_priority(source, 1);
      core.set_enabled(Plic::s_context(hart), source, true);
      core.set_threshold(Plic::s_context(hart), 0);
      break;
    }
    case IrqChip::AiaDirect:
      bus.aplic().set_mode(AplicMode::Direct);
      bus.aplic().configure(source, AplicTarget{hart, 1, IrqLevel::S, 0});
      break;
    case IrqChip::AiaMsi: {
      const Identity id = identity == 0 ? source : identity;
      bus.aplic().set_mode(AplicMode::Msi);
      bus.aplic().configure(source, AplicTarget{hart, 1, level, id});
      bus.imsic().set_enabled(hart, level, id, true);
      break;
    }
  }
}

}  // namespace partsim
