// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <sstream>
#include <vector>

#include "partsim/sim/contention.hpp"
#include "partsim/sim/event_queue.hpp"
#include "partsim/sim/rng.hpp"
#include "partsim/sim/trace.hpp"

using namespace partsim;

namespace {

Action tag(std::uint32_t code) { return Action{Target::Driver, code, 0, 0}; }

}  // namespace

TEST(EventQueue, EarlierDueDispatchesFirst) {
  EventQueue q;
  q.schedule(SimTime{100}, tag(1));
  q.schedule(SimTime{50}, tag(2));
  auto a = q.advance();
  ASSERT_TRUE(a);
  EXPECT_EQ(a->action.code, 2u);
  EXPECT_EQ(q.now(), SimTime{50});
  auto b = q.advance();
  ASSERT_TRUE(b);
  EXPECT_EQ(b->action.code, 1u);
}

TEST(EventQueue, EqualDueKeepsInsertionOrder) {
  EventQueue q;
  for (std::uint32_t i = 0; i < 8; ++i) q.schedule(SimTime{100}, tag(i));
  for (std::uint32_t i = 0; i < 8; ++i) EXPECT_EQ(q.advance()->action.code, i);
}

TEST(EventQueue, PastEventAborts) {
  EventQueue q;
  q.schedule(SimTime{10}, tag(0));
  q.advance();
  EXPECT_THROW(q.schedule(SimTime{5}, tag(1)), SimulationError);
  try {
    q.schedule(SimTime{5}, tag(1));
  } catch (const SimulationError& e) {
    EXPECT_NE(std::string(e.what()).find("past"), std::string::npos);
  }
}

TEST(EventQueue, AdvanceSingleAndEmpty) {
  EventQueue q;
  EXPECT_FALSE(q.advance().has_value());
  q.schedule(SimTime{7}, tag(0));
  EXPECT_EQ(q.advance()->due, SimTime{7});
  EXPECT_EQ(q.now(), SimTime{7});
  EXPECT_FALSE(q.advance().has_value());
}

TEST(EventQueue, AdvanceSequence339) {
  EventQueue q;
  q.schedule(SimTime{9}, tag(0));
  q.schedule(SimTime{3}, tag(1));
  q.schedule(SimTime{3}, tag(2));
  std::vector<Cycles> times;
  while (auto e = q.advance()) times.push_back(e->due.cycles);
  EXPECT_EQ(times, (std::vector<Cycles>{3, 3, 9}));
}

TEST(EventQueue, DrainIsSortedByDueThenSequence) {
  RngState rng(7);
  EventQueue q;
  for (int i = 0; i < 5000; ++i) q.schedule(SimTime{rng.uniform_int(0, 300)}, tag(static_cast<std::uint32_t>(i)));
  std::optional<Event> prev;
  std::size_t n = 0;
  while (auto e = q.advance()) {
    if (prev) {
      ASSERT_TRUE(prev->due < e->due || (prev->due == e->due && prev->sequence < e->sequence));
    }
    prev = e;
    ++n;
  }
  EXPECT_EQ(n, 5000u);
  EXPECT_EQ(q.dispatched(), 5000u);
}

TEST(Rng, SameSeedSameStream) {
  RngState a(42), b(42), c(43);
  bool differs = false;
  for (int i = 0; i < 1000; ++i) {
    const auto x = a.next();
    EXPECT_EQ(x, b.next());
    differs |= x != c.next();
  }
  EXPECT_TRUE(differs);
}

TEST(Rng, UniformIntStaysInRange) {
  RngState rng(3);
  for (int i = 0; i < 100000; ++i) {
    const auto v = rng.uniform_int(10, 20);
    ASSERT_GE(v, 10u);
    ASSERT_LE(v, 20u);
  }
  EXPECT_EQ(rng.uniform_int(5, 5), 5u);
}

TEST(Rng, Uniform01HalfOpen) {
  RngState rng(9);
  double sum = 0;
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform01();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / 100000, 0.5, 0.01);
}

TEST(Rng, DeriveSeparatesStreams) {
  EXPECT_NE(RngState::derive(1, 0), RngState::derive(1, 1));
  EXPECT_NE(RngState::derive(1, 0), RngState::derive(2, 0));
  EXPECT_EQ(RngState::derive(5, 9), RngState::derive(5, 9));
}

TEST(Contention, ZeroLevelIsFreeAndConsumesNothing) {
  RngState rng(42);
  const RngState before = rng;
  for (int i = 0; i < 100; ++i) EXPECT_EQ(sample_contention(0.0, rng), 0u);
  EXPECT_EQ(rng, before);
}

TEST(Contention, FullLevelSeed42InRange) {
  RngState rng(42);
  const ContentionModel model;
  const Cycles v = sample_contention(1.0, rng, model);
  EXPECT_LE(v, model.max_tail);
}

TEST(Contention, MillionDrawsBounded) {
  RngState rng(42);
  const ContentionModel model;
  Cycles lo = ~Cycles{0}, hi = 0;
  for (int i = 0; i < 1000000; ++i) {
    const Cycles v = sample_contention(1.0, rng, model);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  EXPECT_EQ(lo, 0u);
  EXPECT_LE(hi, model.max_tail);
  EXPECT_GE(hi, model.min_tail);
}

TEST(Contention, RejectsBadInput) {
  RngState rng(1);
  EXPECT_THROW(sample_contention(1.5, rng), std::invalid_argument);
  EXPECT_THROW(sample_contention(-0.1, rng), std::invalid_argument);
  ContentionModel bad;
  bad.min_tail = 9000;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
}

TEST(Trace, RecordsInOrderAndWritesCsv) {
  Trace t(true);
  t.record(SimTime{1}, 0, TraceKind::TrapEntry, "a");
  t.record(SimTime{2}, 1, TraceKind::Mmio, "b");
  EXPECT_THROW(t.record(SimTime{1}, 0, TraceKind::Mmio, "c"), SimulationError);
  std::ostringstream out;
  t.write_csv(out);
  EXPECT_EQ(out.str().rfind("time,hart,kind,detail\n", 0), 0u);
  Trace off;
  off.record(SimTime{1}, 0, TraceKind::Mmio, "x");
  EXPECT_TRUE(off.records().empty());
}
