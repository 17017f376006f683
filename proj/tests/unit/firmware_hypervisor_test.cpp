// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <vector>

#include "partsim/guests/scripted.hpp"
#include "partsim/scenarios/system.hpp"

using namespace partsim;

namespace {

RunSpec spec_for(Scenario s, IrqChip chip = IrqChip::PlicClint) {
  RunSpec spec;
  spec.scenario = s;
  spec.irqchip = chip;
  spec.params.iterations = 1;
  return spec;
}

// Arms the timer `count` times at `offset` cycles after the arming point
// and records when each interrupt arrives. An offset of zero with
// `absolute_past` set arms with a deadline already in the past.
class TimerProbe : public GuestProgram {
 public:
  TimerProbe(unsigned count, Cycles offset, bool absolute_past = false, Cycles lead_in = 5000)
      : count_(count), offset_(offset), past_(absolute_past), lead_in_(lead_in) {}

  void boot(HartContext& ctx) override {
    const Interrupt ti{IrqType::Timer, ctx.machine().virtualized() ? IrqLevel::VS : IrqLevel::S};
    ctx.machine().set_enabled(ctx.hart(), ti, true);
    ctx.set_interrupts_enabled(true);
    ctx.local(lead_in_, [this](HartContext& c, OpResult) { arm(c); });
  }

  void on_trap(HartContext& ctx, const TrapRecord&) override {
    arrivals.push_back(ctx.now());
    if (arrivals.size() < count_) {
      arm(ctx);
    } else {
      ctx.ecall(SbiCall::set_timer(ctx.hart(), SimTime::max()), [this](HartContext&, OpResult) { finished = true; });
    }
    ctx.trap_return();
  }

  std::vector<SimTime> issued;
  std::vector<SimTime> deadlines;
  std::vector<SimTime> arrivals;
  bool finished = false;

 private:
  void arm(HartContext& ctx) {
    issued.push_back(ctx.now());
    const SimTime deadline = past_ ? SimTime{1} : ctx.now() + offset_;
    deadlines.push_back(deadline);
    ctx.ecall(SbiCall::set_timer(ctx.hart(), deadline));
  }

  unsigned count_;
  Cycles offset_;
  bool past_;
  Cycles lead_in_;
};

struct Scripted {
  explicit Scripted(RunSpec spec, std::vector<ScriptedAction> actions)
      : system(std::move(spec), false), guest(std::move(actions)) {
    system.platform().set_guest(system.spec().params.hart, &guest);
  }
  void run() {
    system.run([this] { return guest.done(); });
  }
  System system;
  ScriptedGuest guest;
};

ScriptedAction sbi(SbiCall call) {
  ScriptedAction a;
  a.kind = ScriptedAction::Kind::Sbi;
  a.call = call;
  return a;
}

ScriptedAction mmio(ScriptedAction::Kind kind, Addr addr, Word value = 0) {
  ScriptedAction a;
  a.kind = kind;
  a.addr = addr;
  a.value = value;
  return a;
}

}  // namespace

TEST(Firmware, SetTimerFiresWithConstantDelayOnBareMetal) {
  System sys(spec_for(Scenario::A), false);
  TimerProbe probe(5, 1000);
  sys.platform().set_guest(4, &probe);
  sys.run([&] { return probe.finished; });
  ASSERT_EQ(probe.arrivals.size(), 5u);
  const Cycles delay = probe.arrivals[0] - probe.deadlines[0];
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_GE(probe.arrivals[i], probe.deadlines[i]);
    EXPECT_EQ(probe.arrivals[i] - probe.deadlines[i], delay);
  }
  EXPECT_LT(delay, 1000u);
  EXPECT_EQ(sys.machine().entries(PrivilegeMode::HS), 0u);
}

TEST(Firmware, PastDeadlineBehavesLikeDeadlineNow) {
  System past_sys(spec_for(Scenario::A), false);
  TimerProbe past(1, 0, true);
  past_sys.platform().set_guest(4, &past);
  past_sys.run([&] { return past.finished; });

  System now_sys(spec_for(Scenario::A), false);
  TimerProbe now(1, 0, false);
  now_sys.platform().set_guest(4, &now);
  now_sys.run([&] { return now.finished; });

  ASSERT_EQ(past.arrivals.size(), 1u);
  ASSERT_EQ(now.arrivals.size(), 1u);
  EXPECT_EQ(past.issued[0], now.issued[0]);
  EXPECT_EQ(past.arrivals[0], now.arrivals[0]);
  EXPECT_LT(past.arrivals[0] - past.issued[0], 1000u);
}

TEST(Firmware, SendIpiImmediateForms) {
  System sys(spec_for(Scenario::A), false);
  Firmware& fw = sys.firmware();
  Machine& m = sys.machine();
  EXPECT_EQ(fw.sbi_send_ipi(0, HartMask{}).status, SbiStatus::Ok);
  for (HartId h = 0; h < m.size(); ++h) EXPECT_FALSE(m.pending(h, irq::kMsi));

  EXPECT_EQ(fw.sbi_send_ipi(0, HartMask::single(1)).status, SbiStatus::Ok);
  EXPECT_TRUE(m.pending(1, irq::kMsi));
  EXPECT_FALSE(m.pending(0, irq::kMsi));

  EXPECT_EQ(fw.sbi_send_ipi(2, HartMask::of({0, 1})).status, SbiStatus::Ok);
  EXPECT_EQ(m.next_eligible(0), irq::kMsi);
  EXPECT_EQ(m.next_eligible(1), irq::kMsi);
  EXPECT_EQ(sys.bus().clint().msip(0), true);

  EXPECT_EQ(fw.sbi_send_ipi(0, HartMask::single(40)).status, SbiStatus::Invalid);
  EXPECT_EQ(fw.sbi_hart_stop(0, 3).status, SbiStatus::Ok);
  EXPECT_FALSE(fw.hart_started(3));
  EXPECT_EQ(fw.sbi_hart_start(0, 99).status, SbiStatus::Invalid);
}

TEST(Firmware, SendIpiFanOutTrapsEachTarget) {
  RunSpec spec = spec_for(Scenario::A);
  Scripted s(spec, {sbi(SbiCall::send_ipi(4, HartMask::of({0, 1})))});
  s.run();
  ASSERT_EQ(s.guest.outcomes().size(), 1u);
  EXPECT_TRUE(s.guest.outcomes()[0].ok());
  // one ecall entry plus one software-interrupt entry per target
  EXPECT_EQ(s.system.machine().entries(PrivilegeMode::M), 3u);
  EXPECT_EQ(s.system.firmware().counters().software_irqs, 2u);
  EXPECT_TRUE(s.system.machine().pending(0, irq::kSsi));
  EXPECT_TRUE(s.system.machine().pending(1, irq::kSsi));
}

TEST(Firmware, RfenceFromBareMetal) {
  Scripted s(spec_for(Scenario::A), {sbi(SbiCall::rfence(4, HartMask::single(4)))});
  s.run();
  EXPECT_EQ(s.system.machine().entries(PrivilegeMode::M), 1u);
  EXPECT_EQ(s.system.machine().entries(PrivilegeMode::HS), 0u);
}

TEST(Firmware, RfenceFromGuestIsModerated) {
  Scripted s(spec_for(Scenario::B), {sbi(SbiCall::rfence(4, HartMask::single(4)))});
  s.run();
  EXPECT_EQ(s.system.machine().entries(PrivilegeMode::M), 1u);
  EXPECT_EQ(s.system.machine().entries(PrivilegeMode::HS), 1u);
  EXPECT_EQ(s.system.hypervisor()->counters().sbi_moderation, 1u);
  EXPECT_TRUE(s.guest.outcomes()[0].ok());
}

TEST(Firmware, RfenceCostsAddUp) {
  const auto end_time = [](std::size_t calls) {
    std::vector<ScriptedAction> actions(calls, sbi(SbiCall::rfence(4, HartMask::single(4))));
    Scripted s(spec_for(Scenario::B), actions);
    s.run();
    EXPECT_EQ(s.system.machine().entries(PrivilegeMode::HS), calls);
    EXPECT_EQ(s.system.machine().entries(PrivilegeMode::M), calls);
    return s.system.platform().now().cycles;
  };
  const Cycles zero = end_time(0);
  const Cycles one = end_time(1);
  const Cycles two = end_time(2);
  EXPECT_GT(one, zero);
  EXPECT_EQ(two - zero, 2 * (one - zero));
}

class Lifecycle : public ::testing::Test {
 protected:
  Lifecycle()
      : platform(Machine(6, true), CostModel{}, 1),
        bus(DeviceLayout{}, platform.machine(), [](SimTime) {}),
        hv(platform, bus, HypervisorConfig{}) {}

  static CellConfig bench() {
    CellConfig c;
    c.name = "bench";
    c.harts = HartMask::of({4, 5});
    c.memory = {MemRange{0xA0000000, 0x10000000}};
    c.irq_sources = {12};
    return c;
  }

  Platform platform;
  DeviceBus bus;
  Hypervisor hv;
};

TEST_F(Lifecycle, CreateCarvesFromRoot) {
  const CellId id = hv.create_cell(bench());
  const Cell& root = hv.root();
  EXPECT_FALSE(root.harts.contains(4));
  EXPECT_FALSE(root.harts.contains(5));
  EXPECT_FALSE(root.owns_source(12));
  EXPECT_FALSE(root.memory.intersects(MemRange{0xA0000000, 0x10000000}));
  EXPECT_EQ(hv.cell(id).harts, HartMask::of({4, 5}));
  EXPECT_EQ(platform.machine().hart(4).owner, id);
  EXPECT_EQ(platform.translation(4).stages, 2u);
}

TEST_F(Lifecycle, ConflictRollsBack) {
  hv.create_cell(bench());
  const Cell before = hv.root();
  CellConfig other = bench();
  other.name = "other";
  other.harts = HartMask::of({3, 4});
  other.memory = {MemRange{0x80000000, 0x1000}};
  EXPECT_THROW(hv.create_cell(other), CellError);
  const Cell& after = hv.root();
  EXPECT_EQ(after.harts, before.harts);
  EXPECT_EQ(after.memory, before.memory);
  EXPECT_EQ(after.irq_sources, before.irq_sources);
  EXPECT_EQ(hv.cells().size(), 2u);
  EXPECT_EQ(platform.machine().hart(3).owner, Hypervisor::kRootCell);

  CellConfig bad_source = other;
  bad_source.harts = HartMask::of({3});
  bad_source.irq_sources = {12};
  EXPECT_THROW(hv.create_cell(bad_source), CellError);
  EXPECT_EQ(hv.root().memory, before.memory);
}

TEST_F(Lifecycle, CreateDestroyRestoresRoot) {
  const Cell before = hv.root();
  const CellId id = hv.create_cell(bench());
  hv.destroy_cell(id);
  EXPECT_EQ(hv.root().harts, before.harts);
  EXPECT_EQ(hv.root().memory, before.memory);
  EXPECT_EQ(hv.root().irq_sources, before.irq_sources);
  EXPECT_EQ(platform.machine().hart(4).owner, Hypervisor::kRootCell);
}

TEST_F(Lifecycle, PhaseDiscipline) {
  const CellId id = hv.create_cell(bench());
  hv.start_cell(id);
  EXPECT_THROW(hv.start_cell(id), CellError);
  EXPECT_THROW(hv.destroy_cell(id), CellError);
  EXPECT_THROW(hv.destroy_cell(Hypervisor::kRootCell), CellError);
  hv.enter_operational();
  EXPECT_EQ(hv.phase(), HvPhase::Operational);
  CellConfig other = bench();
  other.name = "late";
  other.harts = HartMask::of({3});
  other.memory.clear();
  other.irq_sources.clear();
  EXPECT_THROW(hv.create_cell(other), CellError);
  EXPECT_THROW(hv.stop_cell(id), CellError);
  EXPECT_THROW(hv.enter_operational(), CellError);
}

TEST_F(Lifecycle, RootKeepsAHart) {
  CellConfig all = bench();
  all.harts = HartMask::first(6);
  EXPECT_THROW(hv.create_cell(all), CellError);
}

TEST_F(Lifecycle, RandomSequencesKeepPartition) {
  RngState rng(17);
  std::vector<CellId> live;
  for (int step = 0; step < 2000; ++step) {
    if (!live.empty() && rng.bernoulli(0.4)) {
      const std::size_t i = rng.uniform_int(0, live.size() - 1);
      hv.destroy_cell(live[i]);
      live.erase(live.begin() + static_cast<std::ptrdiff_t>(i));
    } else {
      CellConfig c;
      c.name = "c" + std::to_string(step);
      c.harts = HartMask(rng.uniform_int(1, 63));
      const Addr base = 0x80000000 + rng.uniform_int(0, 15) * 0x1000000;
      c.memory = {MemRange{base, 0x1000000}};
      c.irq_sources = {static_cast<SourceId>(rng.uniform_int(1, 31))};
      try {
        live.push_back(hv.create_cell(c));
      } catch (const CellError&) {
      }
    }
    HartMask seen;
    RangeSet mem;
    Addr total = 0;
    std::set<SourceId> sources;
    std::size_t source_count = 0;
    for (const auto& [id, cell] : hv.cells()) {
      ASSERT_FALSE(seen.intersects(cell.harts));
      seen = seen | cell.harts;
      for (const MemRange& r : cell.memory.ranges()) mem.add(r);
      total += cell.memory.total();
      sources.insert(cell.irq_sources.begin(), cell.irq_sources.end());
      source_count += cell.irq_sources.size();
    }
    ASSERT_EQ(seen, HartMask::first(6));
    ASSERT_EQ(mem, (RangeSet{MemRange{0x80000000, 0x40000000}}));
    ASSERT_EQ(total, 0x40000000u);
    ASSERT_EQ(source_count, sources.size());
    ASSERT_FALSE(hv.root().harts.empty());
  }
}

TEST(Hypervisor, InjectionSetsVsBitsAndCounts) {
  System sys(spec_for(Scenario::B), false);
  Hypervisor& hv = *sys.hypervisor();
  hv.inject_irq(4, IrqType::Timer);
  EXPECT_TRUE(sys.machine().pending(4, irq::kVsti));
  EXPECT_EQ(hv.counters().timer_injection, 1u);
  hv.inject_irq(4, IrqType::Software);
  EXPECT_TRUE(sys.machine().pending(4, irq::kVssi));
  EXPECT_EQ(hv.counters().ipi_injection, 1u);
  hv.inject_irq(4, IrqType::External);
  EXPECT_TRUE(sys.machine().pending(4, irq::kVsei));
  EXPECT_EQ(hv.counters().external_injection, 1u);
  EXPECT_EQ(hv.last_action().kind, HvAction::Kind::Inject);
  EXPECT_EQ(hv.actions(HvAction::Kind::Inject), 3u);
}

TEST(Hypervisor, TimerForGuestIsInjected) {
  System sys(spec_for(Scenario::B), false);
  TimerProbe probe(1, 2000);
  sys.platform().set_guest(4, &probe);
  sys.run([&] { return probe.finished; });
  const InterventionCounter& c = sys.hypervisor()->counters();
  EXPECT_EQ(c.timer_injection, 1u);
  EXPECT_EQ(c.sbi_moderation, 2u);
  EXPECT_EQ(c.total(), 3u);
}

TEST(Hypervisor, SendIpiInsideCellIsForwarded) {
  Scripted s(spec_for(Scenario::B), {sbi(SbiCall::send_ipi(4, HartMask::single(5)))});
  s.run();
  const InterventionCounter& c = s.system.hypervisor()->counters();
  EXPECT_EQ(c.sbi_moderation, 1u);
  EXPECT_EQ(c.ipi_injection, 1u);
  EXPECT_EQ(c.denied, 0u);
  EXPECT_TRUE(s.system.machine().pending(5, irq::kVssi));
  EXPECT_EQ(s.system.hypervisor()->actions(HvAction::Kind::ForwardSbi), 1u);
}

TEST(Hypervisor, SendIpiAcrossCellsIsDenied) {
  Scripted s(spec_for(Scenario::B), {sbi(SbiCall::send_ipi(4, HartMask::single(1)))});
  s.run();
  EXPECT_EQ(s.guest.outcomes()[0].status, OpStatus::Denied);
  const InterventionCounter& c = s.system.hypervisor()->counters();
  EXPECT_EQ(c.denied, 1u);
  EXPECT_EQ(c.sbi_moderation, 0u);
  EXPECT_FALSE(s.system.machine().pending(1, irq::kMsi));
  EXPECT_FALSE(s.system.machine().pending(1, irq::kSsi));
  EXPECT_EQ(s.system.machine().entries(PrivilegeMode::M), 0u);
}

TEST(Hypervisor, HartLifecycleCallsDeniedWhenOperational) {
  Scripted s(spec_for(Scenario::B), {sbi(SbiCall::hart_stop(4, 5)), sbi(SbiCall::hart_start(4, 0))});
  s.run();
  EXPECT_EQ(s.guest.outcomes()[0].status, OpStatus::Denied);
  EXPECT_EQ(s.guest.outcomes()[1].status, OpStatus::Denied);
  EXPECT_TRUE(s.system.firmware().hart_started(5));
}

TEST(Hypervisor, EmulatedClaimAndComplete) {
  RunSpec spec = spec_for(Scenario::B);
  const ContextId ctx = Plic::s_context(4);
  Scripted probe_addrs(spec, {});
  const Addr claim = probe_addrs.system.bus().plic_addr(probe_addrs.system.bus().plic().claim_offset(ctx));

  Scripted s(spec, {mmio(ScriptedAction::Kind::MmioRead, claim), mmio(ScriptedAction::Kind::MmioWrite, claim, 12)});
  s.system.bus().plic().core().raise(12);
  s.run();
  ASSERT_EQ(s.guest.outcomes().size(), 2u);
  EXPECT_EQ(s.guest.outcomes()[0].value, 12u);
  EXPECT_TRUE(s.guest.outcomes()[1].ok());
  const PlicCore& core = s.system.bus().plic().core();
  EXPECT_TRUE(core.in_service(ctx).empty());
  EXPECT_EQ(core.counters().completions, 1u);
  const InterventionCounter& c = s.system.hypervisor()->counters();
  EXPECT_EQ(c.external_injection, 1u);
  EXPECT_EQ(c.plic_emulation, 2u);
  EXPECT_EQ(c.total(), 3u);
}

TEST(Hypervisor, ForeignEnableWriteDenied) {
  RunSpec spec = spec_for(Scenario::B);
  Scripted s(spec, {});
  const Plic& plic = s.system.bus().plic();
  const Addr foreign_enable = s.system.bus().plic_addr(plic.enable_offset(Plic::s_context(1), 0));
  const Addr own_enable_foreign_bit = s.system.bus().plic_addr(plic.enable_offset(Plic::s_context(4), 0));
  Scripted t(spec, {mmio(ScriptedAction::Kind::MmioWrite, foreign_enable, Word{1} << 3),
                    mmio(ScriptedAction::Kind::MmioWrite, own_enable_foreign_bit, (Word{1} << 12) | (Word{1} << 3))});
  t.run();
  EXPECT_EQ(t.guest.outcomes()[0].status, OpStatus::Denied);
  EXPECT_EQ(t.guest.outcomes()[1].status, OpStatus::Denied);
  const PlicCore& core = t.system.bus().plic().core();
  EXPECT_FALSE(core.enabled(Plic::s_context(1), 3));
  EXPECT_FALSE(core.enabled(Plic::s_context(4), 3));
  EXPECT_TRUE(core.enabled(Plic::s_context(4), 12));
  EXPECT_EQ(t.system.hypervisor()->counters().denied, 2u);
  EXPECT_EQ(t.system.hypervisor()->counters().plic_emulation, 0u);
}

TEST(Hypervisor, OwnVsFileWriteNeedsNoTrap) {
  RunSpec spec = spec_for(Scenario::B, IrqChip::AiaMsi);
  Scripted probe_addrs(spec, {});
  const Addr own = probe_addrs.system.bus().imsic_addr(probe_addrs.system.bus().imsic().file_offset(5, IrqLevel::VS));
  Scripted s(spec, {mmio(ScriptedAction::Kind::MmioWrite, own, 3)});
  s.run();
  EXPECT_TRUE(s.guest.outcomes()[0].ok());
  EXPECT_EQ(s.system.machine().entries(PrivilegeMode::HS), 0u);
  EXPECT_NE(s.system.bus().imsic().file(5, IrqLevel::VS).eip & (1u << 3), 0u);
}

TEST(Hypervisor, AccessChecksDecodeOwnership) {
  System sys(spec_for(Scenario::B), false);
  const Hypervisor& hv = *sys.hypervisor();
  const Plic& plic = sys.bus().plic();
  const auto at = [&](Addr off, AccessKind k = AccessKind::Read, Word v = 0) {
    return MmioRequest{sys.bus().plic_addr(off), k, v};
  };
  EXPECT_FALSE(hv.check_plic_access(4, at(plic.priority_offset(12))).has_value());
  EXPECT_TRUE(hv.check_plic_access(4, at(plic.priority_offset(3))).has_value());
  EXPECT_FALSE(hv.check_plic_access(4, at(plic.claim_offset(Plic::s_context(5)))).has_value());
  EXPECT_TRUE(hv.check_plic_access(4, at(plic.claim_offset(Plic::m_context(4)))).has_value());
  EXPECT_TRUE(hv.check_plic_access(4, at(plic.claim_offset(Plic::s_context(4)), AccessKind::Write, 3)).has_value());
  EXPECT_TRUE(hv.check_plic_access(4, at(plic.layout().pending, AccessKind::Write, 0)).has_value());
}
