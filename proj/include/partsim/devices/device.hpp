// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <string_view>

#include "partsim/devices/memory_map.hpp"
#include "partsim/machine/machine.hpp"
#include "partsim/machine/mmio.hpp"

namespace partsim {

/// Level of an interrupt line driven by a device into a hart.
using IrqLine = std::function<void(HartId hart, Interrupt irq, bool level)>;

/// Register-level device behind the memory map. Offsets are relative to the
/// device base.
class Device {
 public:
  virtual ~Device() = default;
  virtual std::string_view name() const = 0;
  virtual Addr size() const = 0;
  virtual OpResult read(HartId initiator, Addr offset) = 0;
  virtual OpResult write(HartId initiator, Addr offset, Word value) = 0;
  /// Contexts with registers on the page at `page_offset`.
  virtual PageScope page_scope(Addr page_offset) const = 0;
};

}  // namespace partsim
