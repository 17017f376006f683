// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <algorithm>
#include <vector>

#include "partsim/guests/mailbox.hpp"
#include "partsim/report/serialize.hpp"
#include "partsim/scenarios/compare.hpp"
#include "partsim/scenarios/run.hpp"
#include "partsim/scenarios/sweep.hpp"

using namespace partsim;

namespace {

RunSpec make(BenchmarkKind b, Scenario s, IrqChip chip = IrqChip::PlicClint, std::uint64_t iterations = 300) {
  RunSpec spec;
  spec.benchmark = b;
  spec.scenario = s;
  spec.irqchip = chip;
  spec.params.iterations = iterations;
  return spec;
}

std::vector<Cycles> cycles_of(const ResultSet& r) {
  std::vector<Cycles> out;
  for (const BenchmarkSample& s : r.samples) out.push_back(s.cycles);
  return out;
}

}  // namespace

TEST(Mailbox, ExactlyOnceInOrder) {
  Mailbox box;
  RngState rng(4);
  std::vector<std::uint64_t> sent[2];
  std::vector<std::uint64_t> got[2];
  for (std::uint64_t i = 0; i < 5000; ++i) {
    const auto lane = static_cast<HartId>(rng.uniform_int(0, 1));
    if (rng.bernoulli(0.6)) {
      box.post(lane, 1 - lane, i);
      sent[lane].push_back(i);
    } else if (auto v = box.take(lane, 1 - lane)) {
      got[lane].push_back(*v);
    }
  }
  for (HartId lane = 0; lane < 2; ++lane) {
    while (auto v = box.take(lane, 1 - lane)) got[lane].push_back(*v);
    EXPECT_EQ(got[lane], sent[lane]);
    EXPECT_EQ(box.queued(lane, 1 - lane), 0u);
  }
  EXPECT_EQ(box.posted(), box.taken());
  EXPECT_FALSE(box.take(0, 1).has_value());
}

TEST(Summary, ConstantSamples) {
  const std::vector<Cycles> c{3, 3, 3};
  const Summary s = summarize_cycles(c);
  EXPECT_EQ(s.min, 3u);
  EXPECT_EQ(s.median, 3u);
  EXPECT_EQ(s.max, 3u);
  EXPECT_EQ(s.p99, 3u);
  EXPECT_DOUBLE_EQ(s.mean, 3.0);
  EXPECT_EQ(s.histogram.occupied(), 1);
}

TEST(Summary, OneToHundredP99) {
  std::vector<Cycles> c;
  for (Cycles i = 1; i <= 100; ++i) c.push_back(i);
  std::reverse(c.begin(), c.end());
  const Summary s = summarize_cycles(c);
  EXPECT_EQ(s.p99, 99u);
  EXPECT_EQ(s.median, 50u);
  EXPECT_EQ(s.min, 1u);
  EXPECT_EQ(s.max, 100u);
  EXPECT_EQ(s.count, 100u);
}

TEST(Summary, OrderStatisticsMatchSorting) {
  RngState rng(8);
  for (int iter = 0; iter < 500; ++iter) {
    const std::size_t n = rng.uniform_int(1, 400);
    std::vector<Cycles> c(n);
    for (auto& v : c) v = rng.uniform_int(0, 100000);
    std::vector<Cycles> sorted = c;
    std::sort(sorted.begin(), sorted.end());
    // smallest value with at least q*n samples at or below it
    const auto quantile = [&](double q) {
      for (Cycles v : sorted) {
        const auto below = static_cast<double>(std::upper_bound(sorted.begin(), sorted.end(), v) - sorted.begin());
        if (below >= q * static_cast<double>(n) - 1e-9) return v;
      }
      return sorted.back();
    };
    const Summary s = summarize_cycles(c);
    ASSERT_EQ(s.median, quantile(0.5));
    ASSERT_EQ(s.p99, quantile(0.99));
    ASSERT_EQ(s.min, sorted.front());
    ASSERT_EQ(s.max, sorted.back());
    ASSERT_EQ(s.histogram.total(), n);
  }
}

TEST(Summary, EmptyRejected) {
  EXPECT_THROW(summarize_cycles(std::vector<Cycles>{}), std::invalid_argument);
}

TEST(Summary, TrapCountsPerIteration) {
  std::vector<BenchmarkSample> samples{{0, 10, 4, 4, {}}, {1, 12, 4, 4, {}}};
  Summary s = summarize(samples);
  EXPECT_EQ(s.hs_traps_per_iteration, 4u);
  EXPECT_TRUE(s.trap_counts_constant);
  samples.push_back({2, 9, 5, 4, {}});
  s = summarize(samples);
  EXPECT_EQ(s.hs_traps_per_iteration, 5u);
  EXPECT_FALSE(s.trap_counts_constant);
}

TEST(Histogram, FixedEdges) {
  EXPECT_EQ(Histogram::bin_of(0), 0);
  EXPECT_EQ(Histogram::bin_of(1), 0);
  EXPECT_EQ(Histogram::bin_of(10), 12);
  EXPECT_EQ(Histogram::bin_of(999999), Histogram::kBins - 1);
  EXPECT_EQ(Histogram::bin_of(50000000), Histogram::kBins - 1);
  EXPECT_DOUBLE_EQ(Histogram::edge(0), 1.0);
  EXPECT_NEAR(Histogram::edge(Histogram::kBins), 1e6, 1e-6);
  for (int i = 0; i < Histogram::kBins; ++i) EXPECT_LT(Histogram::edge(i), Histogram::edge(i + 1));
  for (Cycles v = 1; v < 200000; v = v * 11 / 10 + 1) {
    const int b = Histogram::bin_of(v);
    ASSERT_LE(Histogram::edge(b), static_cast<double>(v) + 1e-9);
    ASSERT_GT(Histogram::edge(b + 1), static_cast<double>(v) - 1e-9);
  }
}

TEST(Run, SameSeedSameResult) {
  const RunSpec spec = make(BenchmarkKind::TimerJitter, Scenario::A, IrqChip::PlicClint, 200);
  const ResultSet a = run(spec);
  const ResultSet b = run(spec);
  EXPECT_EQ(a.samples, b.samples);
  EXPECT_EQ(a.summary, b.summary);
  EXPECT_EQ(a.stats, b.stats);
}

TEST(Run, IpiRoundTripFourInterceptions) {
  const ResultSet r = run(make(BenchmarkKind::IpiRtt, Scenario::B));
  EXPECT_EQ(r.summary.hs_traps_per_iteration, 4u);
  EXPECT_TRUE(r.summary.trap_counts_constant);
  EXPECT_EQ(r.stats.interventions.sbi_moderation, 2 * 300u);
  EXPECT_EQ(r.stats.interventions.ipi_injection, 2 * 300u);
}

TEST(Run, MsiPlicPathNeedsNoEmulation) {
  const ResultSet r = run(make(BenchmarkKind::PlicPath, Scenario::B, IrqChip::AiaMsi));
  EXPECT_EQ(r.stats.interventions.plic_emulation, 0u);
  EXPECT_EQ(r.stats.interventions.external_injection, 0u);
  EXPECT_EQ(r.summary.hs_traps_per_iteration, 0u);
}

TEST(Run, DirectModeAplicStillNeedsThreeTraps) {
  const ResultSet r = run(make(BenchmarkKind::PlicPath, Scenario::B, IrqChip::AiaDirect));
  EXPECT_EQ(r.summary.hs_traps_per_iteration, 3u);
  EXPECT_EQ(r.stats.interventions.external_injection, 300u);
  EXPECT_EQ(r.stats.interventions.plic_emulation, 600u);
}

TEST(Run, BareMetalClaimCostsThreeCycles) {
  const ResultSet r = run(make(BenchmarkKind::PlicPath, Scenario::A));
  EXPECT_EQ(r.summary.min, 3u);
  EXPECT_EQ(r.summary.max, 3u);
  EXPECT_EQ(r.stats.hs_entries, 0u);
  for (const BenchmarkSample& s : r.samples) {
    ASSERT_TRUE(s.phases.has_value());
    EXPECT_EQ(s.phases->claim, s.cycles);
  }
}

TEST(Run, SyncTrapOneModerationPerCall) {
  for (IrqChip chip : kAllIrqChips) {
    const ResultSet b = run(make(BenchmarkKind::SyncTrap, Scenario::B, chip));
    EXPECT_EQ(b.summary.hs_traps_per_iteration, 1u);
    EXPECT_EQ(b.summary.m_entries_per_iteration, 1u);
    EXPECT_EQ(b.stats.interventions.sbi_moderation, 300u);
    const ResultSet a = run(make(BenchmarkKind::SyncTrap, Scenario::A, chip));
    EXPECT_EQ(a.summary.hs_traps_per_iteration, 0u);
    EXPECT_EQ(a.summary.m_entries_per_iteration, 1u);
  }
}

TEST(Run, TimerTrapCounts) {
  const ResultSet b = run(make(BenchmarkKind::TimerJitter, Scenario::B));
  EXPECT_EQ(b.summary.hs_traps_per_iteration, 2u);
  EXPECT_TRUE(b.summary.trap_counts_constant);
  const ResultSet a = run(make(BenchmarkKind::TimerJitter, Scenario::A));
  EXPECT_EQ(a.stats.hs_entries, 0u);
  EXPECT_EQ(a.summary.min, a.summary.max);
}

TEST(Run, BadSpecFailsBeforeSimulation) {
  RunSpec spec = make(BenchmarkKind::IpiRtt, Scenario::B);
  spec.params.peer = 1;
  EXPECT_THROW(run(spec), CellError);
  spec = make(BenchmarkKind::TimerJitter, Scenario::B);
  spec.params.iterations = 0;
  EXPECT_THROW(run(spec), ConfigError);
}

TEST(Load, ZeroIntensityMatchesScenarioB) {
  for (BenchmarkKind k : kAllBenchmarks) {
    RunSpec c = make(k, Scenario::C, IrqChip::PlicClint, 200);
    c.load.config.intensity = 0.0;
    const ResultSet rc = run(c);
    const ResultSet rb = run(make(k, Scenario::B, IrqChip::PlicClint, 200));
    EXPECT_EQ(rc.samples, rb.samples) << to_string(k);
    EXPECT_EQ(rc.stats.interventions, rb.stats.interventions);
    EXPECT_GT(rc.stats.load_bursts, 0u);
  }
}

TEST(Load, HalfIntensityDominatedByFull) {
  RunSpec half = make(BenchmarkKind::PlicPath, Scenario::C, IrqChip::PlicClint, 10000);
  half.load.config.intensity = 0.5;
  RunSpec full = half;
  full.load.config.intensity = 1.0;
  std::vector<Cycles> h = cycles_of(run(half));
  std::vector<Cycles> f = cycles_of(run(full));
  std::sort(h.begin(), h.end());
  std::sort(f.begin(), f.end());
  ASSERT_EQ(h.size(), f.size());
  // empirical CDF of the half-load run lies on or above the full-load one
  for (std::size_t i = 0; i < h.size(); ++i) ASSERT_LE(h[i], f[i]);
  EXPECT_LT(h.back(), f.back());
}

TEST(Load, ContentionDominanceOnRawDraws) {
  RngState a(1), b(1);
  std::vector<Cycles> half, full;
  for (int i = 0; i < 10000; ++i) {
    half.push_back(sample_contention(0.5, a));
    full.push_back(sample_contention(1.0, b));
  }
  std::sort(half.begin(), half.end());
  std::sort(full.begin(), full.end());
  for (std::size_t i = 0; i < half.size(); ++i) ASSERT_LE(half[i], full[i]);
}

TEST(Compare, BareVsPartitionedPlicPath) {
  const ResultSet a = run(make(BenchmarkKind::PlicPath, Scenario::A));
  const ResultSet b = run(make(BenchmarkKind::PlicPath, Scenario::B));
  const Comparison c = compare(a, b);
  EXPECT_EQ(c.hs_trap_delta, 3);
  EXPECT_EQ(c.verdict, Verdict::BaseDominates);
}

TEST(Compare, ReflexiveRatiosAreOne) {
  const ResultSet b = run(make(BenchmarkKind::IpiRtt, Scenario::B));
  const Comparison c = compare(b, b);
  for (const MetricRatio& m : c.metrics) {
    ASSERT_TRUE(m.ratio.has_value()) << m.metric;
    EXPECT_DOUBLE_EQ(*m.ratio, 1.0) << m.metric;
  }
  EXPECT_EQ(c.hs_trap_delta, 0);
  EXPECT_EQ(c.verdict, Verdict::Equivalent);
}

TEST(Compare, MsiRemovesIpiInterceptions) {
  const ResultSet base = run(make(BenchmarkKind::IpiRtt, Scenario::B, IrqChip::PlicClint));
  const ResultSet msi = run(make(BenchmarkKind::IpiRtt, Scenario::B, IrqChip::AiaMsi));
  const Comparison c = compare(base, msi);
  EXPECT_EQ(c.hs_trap_delta, -4);
  EXPECT_EQ(c.verdict, Verdict::OtherDominates);
  EXPECT_NE(format_comparison(c).find("median"), std::string::npos);
}

TEST(Compare, DifferentBenchmarksRejected) {
  const ResultSet a = run(make(BenchmarkKind::SyncTrap, Scenario::A, IrqChip::PlicClint, 10));
  const ResultSet b = run(make(BenchmarkKind::TimerJitter, Scenario::A, IrqChip::PlicClint, 10));
  EXPECT_THROW(compare(a, b), std::invalid_argument);
}

TEST(Config, JsonRoundTrip) {
  RunSpec spec = make(BenchmarkKind::IpiRtt, Scenario::C, IrqChip::AiaDirect, 1234);
  spec.seed = 77;
  spec.machine.costs.trap_cost = 55;
  spec.machine.costs.contention.max_tail = 9000;
  spec.machine.delegation["VS-timer"] = "HS";
  spec.cell.hugepage_gstage = true;
  spec.load.config.intensity = 0.25;
  const nlohmann::json j = spec_to_json(spec);
  const RunSpec back = spec_from_json(j);
  EXPECT_EQ(spec_to_json(back), j);
  EXPECT_EQ(back.label(), "ipi_rtt-C-aia_direct");
  EXPECT_EQ(back.machine.costs.contention.max_tail, 9000u);
  EXPECT_EQ(back.seed, 77u);
}

TEST(Config, PartialOverlayKeepsBase) {
  RunSpec base;
  base.seed = 5;
  const RunSpec s = spec_from_json(nlohmann::json::parse(R"({"scenario": "a", "iterations": 7, "params": {"period": 900}})"), base);
  EXPECT_EQ(s.scenario, Scenario::A);
  EXPECT_EQ(s.params.iterations, 7u);
  EXPECT_EQ(s.params.period, 900u);
  EXPECT_EQ(s.params.irq_period, base.params.irq_period);
  EXPECT_EQ(s.seed, 5u);
}

TEST(Config, UnknownKeyNamesPath) {
  try {
    spec_from_json(nlohmann::json::parse(R"({"machine": {"costs": {"trap_costs": 3}}})"));
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("machine.costs.trap_costs"), std::string::npos) << e.what();
  }
  EXPECT_THROW(spec_from_json(nlohmann::json::parse(R"({"seed": "x"})")), ConfigError);
  EXPECT_THROW(spec_from_json(nlohmann::json::parse(R"({"scenario": "Q"})")), ConfigError);
}

TEST(Config, ParseNames) {
  EXPECT_EQ(parse_scenario("bare-metal"), Scenario::A);
  EXPECT_EQ(parse_scenario("b"), Scenario::B);
  EXPECT_EQ(parse_benchmark("ipi-rtt"), BenchmarkKind::IpiRtt);
  EXPECT_EQ(parse_benchmark("plic_path"), BenchmarkKind::PlicPath);
  EXPECT_EQ(parse_irqchip("aia-msi"), IrqChip::AiaMsi);
  EXPECT_FALSE(parse_benchmark("nope").has_value());
}

TEST(Sweep, ParallelEqualsSerial) {
  RunSpec base;
  base.params.iterations = 150;
  const auto specs = sweep_grid(base, kAllBenchmarks, kAllScenarios, kAllIrqChips);
  ASSERT_EQ(specs.size(), 36u);
  const auto serial = run_sweep_serial(specs);
  const auto parallel = run_sweep_parallel(specs, 4);
  ASSERT_EQ(serial.size(), parallel.size());
  for (std::size_t i = 0; i < serial.size(); ++i) {
    EXPECT_EQ(serial[i].samples, parallel[i].samples) << specs[i].label();
    EXPECT_EQ(dump(result_to_json(serial[i])), dump(result_to_json(parallel[i])));
  }
}

TEST(Sweep, FailurePropagates) {
  RunSpec base;
  base.params.iterations = 10;
  auto specs = sweep_grid(base, kAllBenchmarks, kAllScenarios, kAllIrqChips);
  specs[5].params.iterations = 0;
  EXPECT_THROW(run_sweep_parallel(specs, 2), ConfigError);
}
