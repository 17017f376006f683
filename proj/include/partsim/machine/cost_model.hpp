// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "partsim/sim/contention.hpp"
#include "partsim/sim/rng.hpp"
#include "partsim/sim/time.hpp"

namespace partsim {

/// Analytic TLB model. No page tables are walked; a miss is a Bernoulli draw
/// and costs a fixed walk penalty. Two-stage (G-stage) translation has its
/// own miss probability and walk cost; huge G-stage pages scale the two-stage
/// miss probability by `hugepage_factor`.
struct MemCostModel {
  Cycles base_cost = 4;
  double tlb_miss_prob_1stage = 0.0;
  double tlb_miss_prob_2stage = 0.0;
  Cycles walk_cost_1stage = 60;
  Cycles walk_cost_2stage = 240;
  double hugepage_factor = 0.25;

  void validate() const;

  /// Effective miss probability for a translation regime.
  double miss_probability(unsigned stages, bool hugepage_gstage) const;
};

/// Cycle costs of architectural events. Defaults are nominal values for a
/// 100 MHz in-order core; all of them are configurable.
struct CostModel {
  Cycles trap_cost = 40;          // trap entry + exit, excluding context save
  Cycles irq_latency = 10;        // interrupt recognition before the trap
  Cycles mmio_base_cost = 3;      // one uncontended device register access
  Cycles sbi_cost = 50;           // firmware work per SBI call
  Cycles firmware_irq_cost = 30;  // firmware interrupt dispatch
  Cycles hv_moderation_cost = 60; // hypervisor SBI validation
  Cycles hv_injection_cost = 30;  // hypervisor interrupt re-injection
  Cycles hv_emulation_cost = 120; // hypervisor MMIO decode + validation
  Cycles csr_cost = 2;            // local CSR access (claim via *topei, clear sip)
  Cycles poll_granularity = 10;   // delay until a polling loop observes a bit
  Cycles mailbox_cost = 20;       // extra cost of a shared-memory mailbox access
  unsigned context_save_accesses = 1;  // memory accesses per trap entry

  MemCostModel memory;
  ContentionModel contention;

  void validate() const;
};

/// Cost of one memory access: base + probabilistic TLB walk + contention.
/// Deterministic for a fixed rng state.
Cycles mem_access_cost(const MemCostModel& model, const ContentionModel& contention_model,
                       unsigned stages, bool hugepage_gstage, double contention, RngState& rng);

}  // namespace partsim
