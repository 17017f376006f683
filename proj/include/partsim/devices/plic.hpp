// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "partsim/devices/device.hpp"

namespace partsim {

using SourceId = std::uint32_t;
using ContextId = std::uint32_t;

/// Counters for the claim/complete protocol.
struct ClaimCounters {
  std::uint64_t assertions = 0;  // requests accepted by the gateway
  std::uint64_t coalesced = 0;   // requests merged into an already pending one
  std::uint64_t claims = 0;      // claims that returned a source
  std::uint64_t empty_claims = 0;
  std::uint64_t completions = 0;
  std::uint64_t protocol_violations = 0;

  bool operator==(const ClaimCounters&) const = default;
};

/// Claim/complete state machine of a PLIC, independent of the register map.
/// Source 0 is reserved. A source raised while claimed is latched by its
/// gateway and becomes pending again on completion.
class PlicCore {
 public:
  PlicCore(unsigned sources, unsigned contexts);

  unsigned sources() const { return static_cast<unsigned>(priority_.size()); }
  unsigned contexts() const { return static_cast<unsigned>(threshold_.size()); }

  void raise(SourceId source);
  /// Highest-priority pending enabled source strictly above the context
  /// threshold (ties to the lowest id); 0 if none.
  SourceId best(ContextId context) const;
  SourceId claim(ContextId context);
  void complete(ContextId context, SourceId source);
  /// Interrupt line of the context: true iff best(context) != 0.
  bool line(ContextId context) const { return best(context) != 0; }

  std::uint32_t priority(SourceId source) const { return priority_.at(source); }
  void set_priority(SourceId source, std::uint32_t priority);
  bool pending(SourceId source) const { return pending_.at(source); }
  /// Test hook: sets the pending bit directly (not counted as an assertion).
  void force_pending(SourceId source, bool pending);
  bool enabled(ContextId context, SourceId source) const { return enable_.at(context).at(source); }
  void set_enabled(ContextId context, SourceId source, bool enabled);
  std::uint32_t threshold(ContextId context) const { return threshold_.at(context); }
  void set_threshold(ContextId context, std::uint32_t threshold);
  const std::set<SourceId>& in_service(ContextId context) const { return in_service_.at(context); }
  bool claimed(SourceId source) const { return claimed_.at(source); }
  bool latched(SourceId source) const { return latched_.at(source); }

  const ClaimCounters& counters() const { return counters_; }
  const std::vector<std::string>& violations() const { return violations_; }

  /// Called after every state change that may alter a context line.
  void set_change_listener(std::function<void()> listener) { listener_ = std::move(listener); }

 private:
  void check_source(SourceId source) const;
  void changed() {
    if (listener_) listener_();
  }

  std::vector<std::uint32_t> priority_;
  std::vector<bool> pending_;
  std::vector<bool> claimed_;
  std::vector<bool> latched_;
  std::vector<std::vector<bool>> enable_;
  std::vector<std::uint32_t> threshold_;
  std::vector<std::set<SourceId>> in_service_;
  ClaimCounters counters_;
  std::vector<std::string> violations_;
  std::function<void()> listener_;
};

/// Register layout of a PLIC. Defaults follow the common SiFive map.
struct PlicLayout {
  Addr priority = 0x0;
  Addr pending = 0x1000;
  Addr enable = 0x2000;
  Addr enable_stride = 0x80;
  Addr context = 0x200000;
  Addr context_stride = 0x1000;
  Addr size = 0x4000000;
  /// Treat threshold/claim pages as shared between harts even when each
  /// context has its own page.
  bool claim_pages_shared = true;

  void validate(unsigned sources, unsigned contexts) const;
};

/// Decoded PLIC register.
struct PlicRegister {
  enum class Kind : std::uint8_t { Priority, Pending, Enable, Threshold, ClaimComplete, Invalid };
  Kind kind = Kind::Invalid;
  SourceId source = 0;    // Priority
  unsigned word = 0;      // Pending, Enable
  ContextId context = 0;  // Enable, Threshold, ClaimComplete
};

/// PLIC with two contexts per hart: 2h is the M context, 2h+1 the supervisor
/// context. Context lines drive MEIP / SEIP of the hart.
class Plic : public Device {
 public:
  Plic(unsigned harts, unsigned sources, PlicLayout layout, IrqLine line);

  static constexpr ContextId m_context(HartId hart) { return 2 * hart; }
  static constexpr ContextId s_context(HartId hart) { return 2 * hart + 1; }
  static constexpr HartId context_hart(ContextId context) { return context / 2; }
  static constexpr bool is_s_context(ContextId context) { return context % 2 == 1; }

  std::string_view name() const override { return "plic"; }
  Addr size() const override { return layout_.size; }
  OpResult read(HartId initiator, Addr offset) override;
  OpResult write(HartId initiator, Addr offset, Word value) override;
  PageScope page_scope(Addr page_offset) const override;

  PlicRegister decode(Addr offset) const;
  Addr claim_offset(ContextId context) const { return layout_.context + layout_.context_stride * context + 4; }
  Addr threshold_offset(ContextId context) const { return layout_.context + layout_.context_stride * context; }
  Addr enable_offset(ContextId context, unsigned word) const {
    return layout_.enable + layout_.enable_stride * context + 4 * word;
  }
  Addr priority_offset(SourceId source) const { return layout_.priority + 4 * source; }

  PlicCore& core() { return core_; }
  const PlicCore& core() const { return core_; }
  const PlicLayout& layout() const { return layout_; }

 private:
  void update_lines();

  PlicLayout layout_;
  PlicCore core_;
  IrqLine line_;
  std::vector<bool> lines_;
};

}  // namespace partsim
