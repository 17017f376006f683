// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "partsim/devices/device.hpp"

namespace partsim {

using Identity = std::uint32_t;

/// One interrupt file: pending and enable bits over MSI identities.
struct ImsicFile {
  std::uint64_t eip = 0;
  std::uint64_t eie = 0;
  bool delivery = true;
  Identity threshold = 0;  // 0 = no threshold

  /// Lowest pending enabled identity below the threshold, or 0.
  Identity top() const;
};

struct ImsicCounters {
  std::uint64_t msi_writes = 0;
  std::uint64_t eip_sets = 0;        // writes that raised a clear eip bit
  std::uint64_t absorbed_writes = 0; // writes to an already pending identity
  std::uint64_t ignored_writes = 0;  // identity 0 or out of range
  std::uint64_t claims = 0;

  bool operator==(const ImsicCounters&) const = default;
};

/// Incoming MSI controller with M, S and VS files per hart. Files are laid
/// out one per page so ownership can be granted per file: M files at
/// `m_base + h*0x1000`, S files at `s_base + h*0x2000` with the hart's VS file
/// on the following page. The device region covers both areas; `m_base` is
/// the region base.
class Imsic : public Device {
 public:
  static constexpr Addr kSetEipNum = 0x0;

  /// `s_offset` is the offset of the S/VS area from the region base.
  Imsic(unsigned harts, unsigned identities, Addr s_offset, IrqLine line);

  std::string_view name() const override { return "imsic"; }
  Addr size() const override;
  OpResult read(HartId initiator, Addr offset) override;
  OpResult write(HartId initiator, Addr offset, Word value) override;
  PageScope page_scope(Addr page_offset) const override;

  /// Offset of a file page relative to the region base.
  Addr file_offset(HartId hart, IrqLevel level) const;

  /// Delivers identity `id` to a file. Identity 0 is ignored.
  void msi_write(HartId hart, IrqLevel level, Identity id);
  /// Reads and clears the top identity of a file (the *topei claim). 0 if none.
  Identity claim_top(HartId hart, IrqLevel level);
  void set_enabled(HartId hart, IrqLevel level, Identity id, bool enabled);

  const ImsicFile& file(HartId hart, IrqLevel level) const;
  ImsicFile& file(HartId hart, IrqLevel level);
  unsigned identities() const { return identities_; }
  const ImsicCounters& counters() const { return counters_; }

 private:
  void update_line(HartId hart, IrqLevel level);

  unsigned harts_;
  unsigned identities_;
  Addr s_offset_;
  IrqLine line_;
  std::vector<std::array<ImsicFile, 3>> files_;
  std::vector<std::array<bool, 3>> lines_;
  ImsicCounters counters_;
};

}  // namespace partsim
