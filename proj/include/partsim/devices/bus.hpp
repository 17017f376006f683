// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <optional>

#include "partsim/devices/aplic.hpp"
#include "partsim/devices/clint.hpp"
#include "partsim/devices/imsic.hpp"
#include "partsim/devices/irqchip.hpp"
#include "partsim/devices/memory_map.hpp"
#include "partsim/devices/plic.hpp"
#include "partsim/devices/sswi.hpp"
#include "partsim/machine/machine.hpp"

namespace partsim {

/// Physical placement of the interrupt controllers.
struct DeviceLayout {
  Addr clint_base = 0x02000000;
  Addr sswi_base = 0x02100000;
  Addr plic_base = 0x0C000000;
  Addr aplic_base = 0x10000000;
  Addr imsic_base = 0x24000000;
  Addr imsic_s_offset = 0x04000000;
  unsigned sources = 32;
  unsigned identities = 64;
  PlicLayout plic;

  void validate(unsigned harts) const;
};

/// All interrupt controllers of the platform behind one memory map. VS
/// accesses reach a device only on pages owned exclusively by the
/// accessor's cell; everything else from VS faults to the hypervisor.
class DeviceBus : public MmioBus {
 public:
  DeviceBus(const DeviceLayout& layout, Machine& machine, std::function<void(SimTime)> clint_wakeup);

  AccessClass classify(HartId hart, PrivilegeMode mode, Addr addr) const override;
  OpResult access(HartId hart, const MmioRequest& request) override;

  /// Recomputes page owners from the current hart owners.
  void recompute_ownership();

  struct Resolved {
    Device* device = nullptr;
    Addr offset = 0;
  };
  std::optional<Resolved> resolve(Addr addr) const;

  Clint& clint() { return *clint_; }
  Plic& plic() { return *plic_; }
  Imsic& imsic() { return *imsic_; }
  Aplic& aplic() { return *aplic_; }
  Sswi& sswi() { return *sswi_; }
  const Clint& clint() const { return *clint_; }
  const Plic& plic() const { return *plic_; }
  const Imsic& imsic() const { return *imsic_; }
  const Aplic& aplic() const { return *aplic_; }
  const Sswi& sswi() const { return *sswi_; }
  const MemoryMap& map() const { return map_; }
  const DeviceLayout& layout() const { return layout_; }

  Addr clint_addr(Addr offset) const { return layout_.clint_base + offset; }
  Addr plic_addr(Addr offset) const { return layout_.plic_base + offset; }
  Addr aplic_addr(Addr offset) const { return layout_.aplic_base + offset; }
  Addr imsic_addr(Addr offset) const { return layout_.imsic_base + offset; }
  Addr sswi_addr(Addr offset) const { return layout_.sswi_base + offset; }

 private:
  DeviceLayout layout_;
  Machine& machine_;
  std::unique_ptr<Clint> clint_;
  std::unique_ptr<Plic> plic_;
  std::unique_ptr<Imsic> imsic_;
  std::unique_ptr<Aplic> aplic_;
  std::unique_ptr<Sswi> sswi_;
  std::vector<Device*> devices_;
  MemoryMap map_;
};

/// Configures the selected controller to deliver wired `source` to the
/// supervisor-level context of `hart`. In MSI mode the source becomes
/// identity `identity` in the hart's `level` file (default: the source id).
void route_wired_source(DeviceBus& bus, IrqChip chip, SourceId source, HartId hart, IrqLevel level,
                        Identity identity = 0);

}  // namespace partsim
