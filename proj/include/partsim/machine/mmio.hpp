// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string_view>

#include "partsim/machine/hart.hpp"
#include "partsim/machine/privilege.hpp"

namespace partsim {

using Addr = std::uint64_t;
using Word = std::uint64_t;

enum class OpStatus : std::uint8_t { Ok, Denied, Invalid };

std::string_view to_string(OpStatus status);

/// Outcome of an operation as seen by the code that issued it.
struct OpResult {
  Word value = 0;
  OpStatus status = OpStatus::Ok;

  bool ok() const { return status == OpStatus::Ok; }
  static OpResult denied() { return {0, OpStatus::Denied}; }
  static OpResult invalid() { return {0, OpStatus::Invalid}; }
  bool operator==(const OpResult&) const = default;
};

enum class AccessKind : std::uint8_t { Read, Write };

struct MmioRequest {
  Addr addr = 0;
  AccessKind kind = AccessKind::Read;
  Word value = 0;

  bool is_write() const { return kind == AccessKind::Write; }
};

/// How an access from a given hart and mode is resolved.
enum class AccessClass : std::uint8_t {
  Direct,      // reaches the device
  GuestFault,  // VS access to a page not exclusively owned by its cell
  Unmapped,    // no device region; denied
};

/// Device side of the memory map as seen by the executor.
class MmioBus {
 public:
  virtual ~MmioBus() = default;
  virtual AccessClass classify(HartId hart, PrivilegeMode mode, Addr addr) const = 0;
  /// Performs the access on the device. Only called for Direct accesses (or
  /// by the hypervisor on a guest's behalf).
  virtual OpResult access(HartId hart, const MmioRequest& request) = 0;
};

}  // namespace partsim
