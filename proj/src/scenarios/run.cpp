// SPDX-License-Identifier: Apache-2.0
#include "partsim/scenarios/run.hpp"

#include <fmt/core.h>

#include "partsim/scenarios/system.hpp"

namespace partsim {

namespace {

RunStats collect(System& sys) {
  RunStats st;
  const Machine& m = sys.platform().machine();
  st.hs_entries = m.entries(PrivilegeMode::HS);
  st.m_entries = m.entries(PrivilegeMode::M);
  if (const Hypervisor* hv = sys.hypervisor()) {
    st.hypervisor_present = true;
    st.interventions = hv->counters();
    st.diagnostics.insert(st.diagnostics.end(), hv->diagnostics().begin(), hv->diagnostics().end());
  }
  st.plic = sys.bus().plic().core().counters();
  st.aplic_direct = sys.bus().aplic().counters().direct;
  st.aplic_msi_forwards = sys.bus().aplic().counters().msi_forwards;
  st.imsic = sys.bus().imsic().counters();
  st.pending_rises = m.conservation().total_rises();
  st.pending_falls = m.conservation().total_falls();
  st.pending_redundant = m.conservation().total_redundant();
  st.mailbox_posted = sys.mailbox().posted();
  st.mailbox_taken = sys.mailbox().taken();
  st.ipi_mismatches = sys.ipi_mismatches();
  st.load_bursts = sys.load() ? sys.load()->bursts() : 0;
  st.events = sys.platform().queue().dispatched();
  st.end_time = sys.platform().now().cycles;
  for (const std::string& v : sys.bus().plic().core().violations()) st.diagnostics.push_back(v);
  for (const std::string& d : sys.bus().aplic().diagnostics()) st.diagnostics.push_back(d);
  return st;
}

}  // namespace

ResultSet run(const RunSpec& spec) {
  System sys(spec);
  try {
    sys.run_benchmark();
  } catch (const SimulationError& e) {
    // a stall caused by a trap nobody handled is reported as that trap
    const Hypervisor* hv = sys.hypervisor();
    if (hv != nullptr && hv->counters().other != 0 && !hv->diagnostics().empty())
      throw ProtocolViolation(fmt::format("{}: {} ({})", spec.label(), hv->diagnostics().front(), e.what()));
    throw;
  }

  ResultSet r;
  r.spec = sys.spec();
  r.samples = sys.take_samples();
  r.stats = collect(sys);
  r.summary = summarize(r.samples);
  r.summary.interventions = r.stats.interventions;
  r.summary.hs_entries = r.stats.hs_entries;
  r.summary.m_entries = r.stats.m_entries;
  if (spec.trace) r.trace = sys.platform().trace().records();

  const std::uint64_t violations = r.stats.plic.protocol_violations + r.stats.aplic_direct.protocol_violations;
  if (violations != 0 || r.stats.interventions.other != 0 || r.stats.ipi_mismatches != 0) {
    throw ProtocolViolation(fmt::format("{}: {} claim/complete violations, {} unattributed HS traps, {} IPI mismatches{}{}",
                                        spec.label(), violations, r.stats.interventions.other, r.stats.ipi_mismatches,
                                        r.stats.diagnostics.empty() ? "" : "; first: ",
                                        r.stats.diagnostics.empty() ? "" : r.stats.diagnostics.front()));
  }
  return r;
}

}  // namespace partsim
