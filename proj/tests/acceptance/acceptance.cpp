// SPDX-License-Identifier: Apache-2.0
// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any fails.
#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/core.h>

#include "partsim/devices/plic.hpp"
#include "partsim/guests/scripted.hpp"
#include "partsim/report/bundle.hpp"
#include "partsim/scenarios/run.hpp"
#include "partsim/scenarios/sweep.hpp"
#include "partsim/scenarios/system.hpp"

using namespace partsim;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kIterations = 10000;

struct Verdict {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond && ok) detail = what;
    ok = ok && cond;
  }
};

RunSpec spec_of(BenchmarkKind b, Scenario s, IrqChip chip, std::uint64_t seed = 1) {
  RunSpec spec;
  spec.benchmark = b;
  spec.scenario = s;
  spec.irqchip = chip;
  spec.seed = seed;
  spec.params.iterations = kIterations;
  return spec;
}

bool constant_hs(const ResultSet& r, std::uint64_t per_iteration) {
  for (const BenchmarkSample& s : r.samples) {
    if (s.hs_traps != per_iteration) return false;
  }
  return r.samples.size() == kIterations;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// shared by criteria 6 and 7
std::map<std::string, ResultSet> g_grid;

const ResultSet& grid(BenchmarkKind b, Scenario s, IrqChip chip) {
  return g_grid.at(spec_of(b, s, chip).label());
}

Verdict ipi_round_trip() {
  Verdict v;
  const auto t0 = std::chrono::steady_clock::now();
  const ResultSet r = run(spec_of(BenchmarkKind::IpiRtt, Scenario::B, IrqChip::PlicClint));
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  v.require(constant_hs(r, 4), "HS traps per iteration not constantly 4");
  v.require(r.stats.interventions.sbi_moderation == 2 * kIterations, "sbi_moderation != 2/iteration");
  v.require(r.stats.interventions.ipi_injection == 2 * kIterations, "ipi_injection != 2/iteration");
  v.require(r.stats.interventions.total() == 4 * kIterations, "other interventions present");
  v.require(secs < 10.0, fmt::format("runtime {:.2f} s", secs));
  if (v.ok) v.detail = fmt::format("4 interceptions/iteration, {:.2f} s", secs);
  return v;
}

Verdict external_irq_path() {
  Verdict v;
  const ResultSet r = run(spec_of(BenchmarkKind::PlicPath, Scenario::B, IrqChip::PlicClint));
  v.require(constant_hs(r, 3), "HS traps per interrupt not constantly 3");
  v.require(r.stats.interventions.external_injection == kIterations, "injections != 1/interrupt");
  v.require(r.stats.interventions.plic_emulation == 2 * kIterations, "emulations != 2/interrupt");
  if (v.ok) v.detail = "1 injection + 2 emulations per interrupt";
  return v;
}

Verdict timer() {
  Verdict v;
  const ResultSet b = run(spec_of(BenchmarkKind::TimerJitter, Scenario::B, IrqChip::PlicClint));
  v.require(constant_hs(b, 2), "B: HS traps per period not constantly 2");
  v.require(b.stats.interventions.sbi_moderation >= kIterations && b.stats.interventions.sbi_moderation <= kIterations + 1,
            "B: set_timer moderations != 1/period");
  v.require(b.stats.interventions.timer_injection == kIterations, "B: timer injections != 1/period");
  const ResultSet a = run(spec_of(BenchmarkKind::TimerJitter, Scenario::A, IrqChip::PlicClint));
  v.require(a.stats.hs_entries == 0, "A: hypervisor traps present");
  v.require(a.summary.min == a.summary.max, fmt::format("A: jitter spread {}..{}", a.summary.min, a.summary.max));
  if (v.ok) v.detail = fmt::format("B 2/period; A 0 HS traps, jitter constant {}", a.summary.min);
  return v;
}

Verdict claim_cost() {
  Verdict v;
  const ResultSet a = run(spec_of(BenchmarkKind::PlicPath, Scenario::A, IrqChip::PlicClint));
  v.require(a.summary.min == 3 && a.summary.max == 3, fmt::format("A claim {}..{}", a.summary.min, a.summary.max));
  const ResultSet c = run(spec_of(BenchmarkKind::PlicPath, Scenario::C, IrqChip::PlicClint));
  const Cycles bare = 3;
  v.require(c.summary.max >= 1000 * bare && c.summary.max <= 10000 * bare,
            fmt::format("C max {} outside [{}, {}]", c.summary.max, 1000 * bare, 10000 * bare));
  if (v.ok) v.detail = fmt::format("A = 3, C max = {} ({}x)", c.summary.max, c.summary.max / bare);
  return v;
}

Verdict msi() {
  Verdict v;
  for (BenchmarkKind k : {BenchmarkKind::IpiRtt, BenchmarkKind::PlicPath}) {
    const ResultSet r = run(spec_of(k, Scenario::B, IrqChip::AiaMsi));
    const auto& iv = r.stats.interventions;
    v.require(r.samples.size() == kIterations, fmt::format("{} incomplete", to_string(k)));
    v.require(iv.ipi_injection == 0 && iv.external_injection == 0 && iv.plic_emulation == 0,
              fmt::format("{}: {} ipi, {} external, {} emulation", to_string(k), iv.ipi_injection,
                          iv.external_injection, iv.plic_emulation));
  }
  const ResultSet s = run(spec_of(BenchmarkKind::SyncTrap, Scenario::B, IrqChip::AiaMsi));
  v.require(constant_hs(s, 1), "sync_trap HS traps not 1/call");
  v.require(s.stats.interventions.sbi_moderation == kIterations, "sync_trap moderations != 1/call");
  if (v.ok) v.detail = "no injection/emulation; sync 1 moderation per call";
  return v;
}

Verdict monotonicity() {
  Verdict v;
  for (BenchmarkKind k : kAllBenchmarks) {
    for (IrqChip chip : kAllIrqChips) {
      const Summary& a = grid(k, Scenario::A, chip).summary;
      const Summary& b = grid(k, Scenario::B, chip).summary;
      const Summary& c = grid(k, Scenario::C, chip).summary;
      const std::string tag = fmt::format("{}/{}", to_string(k), to_string(chip));
      v.require(a.median <= b.median && b.median <= c.median,
                fmt::format("{} median {} {} {}", tag, a.median, b.median, c.median));
      v.require(a.max <= b.max && b.max <= c.max, fmt::format("{} max {} {} {}", tag, a.max, b.max, c.max));
    }
  }
  // trap counts must not depend on the seed
  RunSpec other;
  other.params.iterations = kIterations;
  other.seed = 987654321;
  const auto specs = sweep_grid(other, kAllBenchmarks, kAllScenarios, kAllIrqChips);
  const auto reseeded = run_sweep_parallel(specs);
  for (const ResultSet& r : reseeded) {
    const ResultSet& base = g_grid.at(r.spec.label());
    bool same = r.samples.size() == base.samples.size();
    for (std::size_t i = 0; same && i < r.samples.size(); ++i) {
      same = r.samples[i].hs_traps == base.samples[i].hs_traps && r.samples[i].m_entries == base.samples[i].m_entries;
    }
    v.require(same, fmt::format("{} trap counts differ between seeds", r.spec.label()));
  }
  if (v.ok) v.detail = "36 runs ordered A <= B <= C; trap counts seed-independent";
  return v;
}

Verdict conservation() {
  Verdict v;
  for (const auto& [label, r] : g_grid) {
    const RunStats& s = r.stats;
    v.require(s.pending_rises == s.pending_falls,
              fmt::format("{}: {} pending sets vs {} consumes", label, s.pending_rises, s.pending_falls));
    v.require(s.interventions.other == 0 && s.interventions.denied == 0, fmt::format("{}: other/denied nonzero", label));
    if (s.hypervisor_present) {
      v.require(s.hs_entries == s.interventions.total(), fmt::format("{}: unattributed HS entries", label));
    }
    for (const ClaimCounters* cc : {&s.plic, &s.aplic_direct}) {
      v.require(cc->assertions == cc->claims && cc->claims == cc->completions,
                fmt::format("{}: {} assertions, {} claims, {} completions", label, cc->assertions, cc->claims,
                            cc->completions));
      v.require(cc->protocol_violations == 0, fmt::format("{}: claim protocol violation", label));
    }
    v.require(s.imsic.msi_writes == s.imsic.eip_sets + s.imsic.absorbed_writes + s.imsic.ignored_writes,
              fmt::format("{}: MSI writes unaccounted", label));
    v.require(s.imsic.absorbed_writes == 0 && s.imsic.ignored_writes == 0,
              fmt::format("{}: MSI writes != eip set events", label));
    v.require(s.imsic.eip_sets == s.imsic.claims, fmt::format("{}: eip sets != claims", label));
    v.require(s.mailbox_posted == s.mailbox_taken, fmt::format("{}: mailbox imbalance", label));
    if (r.spec.benchmark == BenchmarkKind::PlicPath && r.spec.irqchip != IrqChip::AiaMsi) {
      const ClaimCounters& cc = r.spec.irqchip == IrqChip::PlicClint ? s.plic : s.aplic_direct;
      v.require(cc.claims == kIterations, fmt::format("{}: {} claims", label, cc.claims));
    }
  }
  if (v.ok) v.detail = fmt::format("{} runs balanced", g_grid.size());
  return v;
}

// Everything outside cell {4, 5} and its source that a guest could disturb.
std::string foreign_state(const System& sys, const std::set<SourceId>& foreign_sources) {
  std::ostringstream o;
  const DeviceBus& bus = sys.bus();
  const Machine& m = sys.platform().machine();
  for (HartId h = 0; h < m.size(); ++h) {
    const bool own = h == 4 || h == 5;
    if (!own) {
      const Hart& hart = m.hart(h);
      o << "hart " << h << ' ' << hart.pending.bits() << ' ' << hart.enable.bits() << ' ' << static_cast<int>(hart.mode)
        << ' ' << sys.firmware().hart_started(h) << ' ' << bus.clint().mtimecmp(h).cycles << ' ' << bus.clint().msip(h)
        << '\n';
    }
    for (IrqLevel l : {IrqLevel::M, IrqLevel::S, IrqLevel::VS}) {
      if (own && l == IrqLevel::VS) continue;
      const ImsicFile& f = bus.imsic().file(h, l);
      o << "imsic " << h << ' ' << static_cast<int>(l) << ' ' << f.eip << ' ' << f.eie << ' ' << f.delivery << ' '
        << f.threshold << '\n';
    }
  }
  const PlicCore& plic = bus.plic().core();
  for (ContextId ctx = 0; ctx < plic.contexts(); ++ctx) {
    if (ctx == Plic::s_context(4) || ctx == Plic::s_context(5)) continue;
    o << "ctx " << ctx << ' ' << plic.threshold(ctx) << ' ' << plic.in_service(ctx).size();
    for (SourceId s = 1; s < plic.sources(); ++s) o << plic.enabled(ctx, s);
    o << '\n';
  }
  for (SourceId s : foreign_sources) {
    if (s == 0 || s >= plic.sources()) continue;
    o << "src " << s << ' ' << plic.priority(s) << ' ' << plic.pending(s) << ' ' << plic.claimed(s);
    if (s < bus.aplic().sources()) {
      const AplicTarget& t = bus.aplic().target(s);
      o << ' ' << bus.aplic().active(s) << bus.aplic().enabled(s) << bus.aplic().pending(s) << ' ' << t.hart << ' '
        << t.priority << ' ' << static_cast<int>(t.level) << ' ' << t.identity;
    }
    o << '\n';
  }
  if (const Hypervisor* hv = sys.hypervisor()) {
    for (const auto& [id, cell] : hv->cells()) {
      o << "cell " << id << ' ' << cell.harts.bits() << ' ' << static_cast<int>(cell.state) << ' '
        << cell.memory.total() << ' ' << cell.irq_sources.size() << '\n';
    }
  }
  return o.str();
}

Verdict isolation() {
  Verdict v;
  std::size_t total = 0;
  for (IrqChip chip : kAllIrqChips) {
    RunSpec spec = spec_of(BenchmarkKind::SyncTrap, Scenario::B, chip, 11);
    System sys(spec, false);
    const Cell& root = sys.hypervisor()->root();
    const ForeignResources foreign{root.harts, root.irq_sources};
    RngState rng(RngState::derive(spec.seed, static_cast<std::uint64_t>(chip)));
    ScriptedGuest guest(adversarial_actions(sys.bus(), 4, HartMask::of({4, 5}), foreign, 1000, rng));
    sys.platform().set_guest(4, &guest);
    const std::string before = foreign_state(sys, foreign.sources);
    sys.run([&] { return guest.done(); });
    const std::string after = foreign_state(sys, foreign.sources);
    v.require(before == after, fmt::format("{}: foreign state changed", to_string(chip)));
    std::size_t denied = 0;
    for (std::size_t i = 0; i < guest.outcomes().size(); ++i) {
      if (guest.outcomes()[i].status == OpStatus::Denied) {
        ++denied;
      } else {
        v.require(false, fmt::format("{}: action '{}' not denied", to_string(chip), guest.actions()[i].label));
      }
    }
    v.require(guest.outcomes().size() == 1000, "script incomplete");
    total += denied;
  }
  if (v.ok) v.detail = fmt::format("{} adversarial actions denied, foreign state unchanged", total);
  return v;
}

Verdict determinism() {
  Verdict v;
  const fs::path root = fs::temp_directory_path() / "partsim_acceptance_det";
  std::size_t files = 0;
  for (BenchmarkKind k : kAllBenchmarks) {
    RunSpec spec = spec_of(k, Scenario::C, IrqChip::PlicClint, 2024);
    spec.params.iterations = 2000;
    spec.trace = k == BenchmarkKind::IpiRtt;
    fs::remove_all(root);
    const auto a = write_bundle(root / "a", run(spec), OutputFormat::All);
    const auto b = write_bundle(root / "b", run(spec), OutputFormat::All);
    v.require(a.size() == b.size(), "file lists differ");
    for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
      v.require(slurp(a[i]) == slurp(b[i]), fmt::format("{} differs", a[i].string()));
      ++files;
    }
  }
  fs::remove_all(root);
  if (v.ok) v.detail = fmt::format("{} file pairs byte-identical", files);
  return v;
}

Verdict claim_oracle() {
  Verdict v;
  RngState rng(77);
  for (int trial = 0; trial < 10000; ++trial) {
    const auto sources = static_cast<unsigned>(rng.uniform_int(2, 32));
    const auto contexts = static_cast<unsigned>(rng.uniform_int(1, 4));
    PlicCore core(sources, contexts);
    for (SourceId s = 1; s < sources; ++s) {
      core.set_priority(s, static_cast<std::uint32_t>(rng.uniform_int(0, 7)));
      if (rng.bernoulli(0.5)) core.force_pending(s, true);
      for (ContextId c = 0; c < contexts; ++c) core.set_enabled(c, s, rng.bernoulli(0.6));
    }
    const auto ctx = static_cast<ContextId>(rng.uniform_int(0, contexts - 1));
    core.set_threshold(ctx, static_cast<std::uint32_t>(rng.uniform_int(0, 7)));
    SourceId expect = 0;
    std::uint32_t best = 0;
    for (SourceId s = 1; s < sources; ++s) {
      const std::uint32_t p = core.priority(s);
      if (core.pending(s) && core.enabled(ctx, s) && p > core.threshold(ctx) && p > best) {
        best = p;
        expect = s;
      }
    }
    const SourceId got = core.claim(ctx);
    if (got != expect) {
      v.require(false, fmt::format("trial {}: claim {} vs oracle {}", trial, got, expect));
      break;
    }
  }
  if (v.ok) v.detail = "10000 random states match";
  return v;
}

}  // namespace

int main() {
  int failures = 0;
  const auto report = [&](int id, const char* name, const std::function<Verdict()>& check) {
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v.ok = false;
      v.detail = fmt::format("exception: {}", e.what());
    }
    failures += v.ok ? 0 : 1;
    std::printf("%s %d %s: %s\n", v.ok ? "PASS" : "FAIL", id, name, v.detail.c_str());
    std::fflush(stdout);
  };

  report(1, "ipi round trip interceptions", ipi_round_trip);
  report(2, "external irq path traps", external_irq_path);
  report(3, "timer traps and jitter", timer);
  report(4, "plic claim cost", claim_cost);
  report(5, "msi removes injection and emulation", msi);

  RunSpec base;
  base.params.iterations = kIterations;
  const auto specs = sweep_grid(base, kAllBenchmarks, kAllScenarios, kAllIrqChips);
  try {
    auto results = run_sweep_parallel(specs);
    for (auto& r : results) g_grid.emplace(r.spec.label(), std::move(r));
  } catch (const std::exception& e) {
    std::printf("grid sweep failed: %s\n", e.what());
  }
  report(6, "monotonicity", monotonicity);
  report(7, "conservation", conservation);
  report(8, "isolation", isolation);
  report(9, "determinism", determinism);
  report(10, "claim oracle", claim_oracle);
  return failures == 0 ? 0 : 1;
}
