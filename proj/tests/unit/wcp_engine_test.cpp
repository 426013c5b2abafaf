#include <gtest/gtest.h>

#include "wcp/trace_io.hpp"
#include "wcp/tracegen.hpp"
#include "wcp/wcp_engine.hpp"

namespace wcp {
namespace {

std::vector<VectorTime> stamps(const Trace& t, WcpEngineOptions opts = {}) {
  WcpEngine engine(std::move(opts));
  std::vector<VectorTime> out;
  for (const Event& e : t.events) out.push_back(engine.process(e));
  return out;
}

TEST(WcpEngine, FirstEventOfEachThread) {
  const auto c = stamps(parse_trace("T1|w|x\nT2|w|x\n"));
  EXPECT_EQ(c[0], VectorTime{1});
  EXPECT_EQ(c[1], (VectorTime{0, 1}));
}

TEST(WcpEngine, AcquireInSecondThread) {
  const Trace& t = gen::fixture("fig1b");
  WcpEngine engine;
  for (EventIdx i = 0; i <= 4; ++i) engine.process(t.events[i]);
  EXPECT_EQ(engine.hb_time(1), (VectorTime{1, 1}));
  EXPECT_TRUE(engine.predecessor_time(1).is_bottom());
  EXPECT_EQ(engine.current_time(1), (VectorTime{0, 1}));
}

TEST(WcpEngine, ReleaseWithoutDrainableEntry) {
  const Trace& t = gen::fixture("fig1b");
  WcpEngine engine;
  for (EventIdx i = 0; i <= 6; ++i) engine.process(t.events[i]);
  // t1's section only read x, so nothing orders it before t2's release.
  EXPECT_TRUE(engine.predecessor_time(1).is_bottom());
  EXPECT_EQ(engine.cursor(0, 1), 0u);
  // Each thread has one undrained section of the other.
  EXPECT_EQ(engine.metrics().queue_load, 2u);
}

TEST(WcpEngine, UnorderedReadsLeaveRace) {
  const auto c = stamps(gen::fixture("fig1b"));
  EXPECT_EQ(c[0], VectorTime{1});
  // The local clock advances after t2's release.
  EXPECT_EQ(c[7], (VectorTime{0, 2}));
  EXPECT_TRUE(concurrent(c[0], c[7]));
}

TEST(WcpEngine, ConflictInSectionOrdersRelease) {
  // fig2a: t2's read of x inside l is ordered after t1's release of l.
  const Trace& t = gen::fixture("fig2a");
  WcpEngine engine;
  std::vector<VectorTime> c;
  for (const Event& e : t.events) {
    c.push_back(engine.process(e));
    if (e.idx == 5) EXPECT_TRUE(leq(c[3], engine.predecessor_time(1)));
  }
  EXPECT_TRUE(leq(c[0], c[6]));
}

TEST(WcpEngine, WriteConflictsOrderBothAccesses) {
  const auto c = stamps(gen::fixture("fig1a"));
  for (EventIdx a : {1u, 2u}) {
    for (EventIdx b : {5u, 6u}) {
      if (a == 1 && b == 5) continue;  // two reads
      EXPECT_TRUE(leq(c[a], c[b])) << a << "," << b;
    }
  }
}

TEST(WcpEngine, ReleaseDrainsCompletedSection) {
  // t2's release of m at line 20 consumes t3's section spanning lines 3..10.
  const Trace& t = gen::fixture("fig7");
  WcpEngine engine;
  std::vector<VectorTime> h(t.events.size());
  for (const Event& e : t.events) {
    engine.process(e);
    h[e.idx] = engine.hb_time(e.tid);
    if (e.idx == 24) EXPECT_FALSE(leq(h[13], engine.predecessor_time(e.tid)));
    if (e.idx == 25) EXPECT_TRUE(leq(h[13], engine.predecessor_time(e.tid)));
  }
}

TEST(WcpEngine, SameClockMeansSameOrderAsThreadOrder) {
  const auto c = stamps(gen::fixture("fig7"));
  const Trace& t = gen::fixture("fig7");
  for (EventIdx i = 0; i < c.size(); ++i) {
    for (EventIdx j = i + 1; j < c.size(); ++j) {
      if (t.events[i].tid == t.events[j].tid) EXPECT_TRUE(leq(c[i], c[j]));
    }
  }
}

TEST(WcpEngine, LocalClockAdvancesOnlyAfterRelease) {
  WcpEngine engine;
  const Trace t = parse_trace("T1|w|x\nT1|w|x\nT1|acq|l\nT1|rel|l\nT1|w|x\nT1|w|x\n");
  std::vector<Tick> local;
  for (const Event& e : t.events) {
    engine.process(e);
    local.push_back(engine.local_time(0));
  }
  EXPECT_EQ(local, (std::vector<Tick>{1, 1, 1, 1, 2, 2}));
}

TEST(WcpEngine, ForkHandsParentTimeToChild) {
  const Trace t = parse_trace("T1|w|x\nT1|fork|T2\nT2|w|y\n");
  WcpEngine engine;
  for (const Event& e : t.events) engine.process(e);
  EXPECT_EQ(engine.hb_time(1), (VectorTime{1, 1}));
  EXPECT_TRUE(engine.predecessor_time(1).is_bottom());
}

TEST(WcpEngine, SiblingsShareParentPrefix) {
  const Trace t = parse_trace("T1|w|x\nT1|fork|T2\nT1|fork|T3\nT2|w|y\nT3|w|y\n");
  WcpEngine engine;
  for (const Event& e : t.events) engine.process(e);
  EXPECT_EQ(engine.hb_time(1).get(0), 1u);
  EXPECT_EQ(engine.hb_time(2).get(0), 2u);
  EXPECT_EQ(engine.hb_time(1).get(1), 1u);
  EXPECT_EQ(engine.hb_time(2).get(2), 1u);
  EXPECT_EQ(engine.hb_time(1).get(2), 0u);
  EXPECT_EQ(engine.hb_time(2).get(1), 0u);
}

TEST(WcpEngine, ParentAccessAfterForkIsUnordered) {
  const auto c = stamps(parse_trace("T1|fork|T2\nT1|w|x\nT2|r|x\n"));
  EXPECT_TRUE(concurrent(c[1], c[2]));
}

TEST(WcpEngine, JoinInheritsChildTimes) {
  const Trace t = parse_trace(
      "T1|fork|T2\nT2|acq|l\nT2|w|x\nT2|rel|l\nT3|acq|l\nT3|w|x\nT3|rel|l\nT1|join|T2\nT1|w|y\n");
  WcpEngine engine;
  for (const Event& e : t.events) engine.process(e);
  EXPECT_TRUE(leq(engine.predecessor_time(1), engine.predecessor_time(0)));
  EXPECT_TRUE(leq(engine.hb_time(1), engine.hb_time(0)));
}

TEST(WcpEngine, SelfJoinAndSelfForkThrow) {
  WcpEngine engine;
  EXPECT_THROW(engine.join(0, 0), EngineError);
  EXPECT_THROW(engine.fork(0, 0), EngineError);
}

TEST(WcpEngine, ForkOfActiveThreadThrows) {
  WcpEngine engine;
  engine.write(1, 0);
  EXPECT_THROW(engine.fork(0, 1), EngineError);
}

TEST(WcpEngine, JoinOfUnknownThreadWarns) {
  WcpEngine engine;
  engine.write(0, 0);
  const VectorTime before = engine.current_time(0);
  EXPECT_NO_THROW(engine.join(0, 5));
  EXPECT_EQ(engine.warnings().size(), 1u);
  EXPECT_EQ(engine.current_time(0), before);
}

TEST(WcpEngine, LockSemanticsViolationsThrow) {
  WcpEngine engine;
  engine.acquire(0, 0);
  EXPECT_THROW(engine.acquire(1, 0), EngineError);
  EXPECT_THROW(engine.release(1, 0), EngineError);
}

TEST(WcpEngine, AcquireOfNeverReleasedLockIsNoOp) {
  WcpEngine engine;
  engine.write(0, 0);
  const VectorTime before = engine.current_time(0);
  engine.acquire(0, 3);
  EXPECT_EQ(engine.current_time(0), before);
}

TEST(WcpEngine, HistoryCollectionRequiresUniverse) {
  WcpEngineOptions opts;
  opts.gc_history = true;
  EXPECT_THROW(WcpEngine{opts}, std::invalid_argument);
  opts.thread_universe = 2;
  EXPECT_NO_THROW(WcpEngine{opts});
}

TEST(WcpEngine, UniverseRejectsOutsideThreads) {
  WcpEngineOptions opts;
  opts.thread_universe = 1;
  WcpEngine engine(opts);
  EXPECT_THROW(engine.write(1, 0), EngineError);
}

TEST(WcpEngine, CollectionKeepsTimestamps) {
  for (const auto& [name, trace] : gen::fixtures()) {
    WcpEngineOptions opts;
    opts.gc_history = true;
    opts.thread_universe = trace.num_threads();
    opts.last_event_of_thread = compute_sections(trace).last_of_thread;
    EXPECT_EQ(stamps(trace, opts), stamps(trace)) << name;
  }
}

TEST(WcpEngine, CollectionBoundsRetainedHistory) {
  gen::ScalingWorkload w(4, 8, 3);
  WcpEngineOptions opts;
  opts.gc_history = true;
  opts.thread_universe = 4;
  WcpEngine engine(opts);
  for (int i = 0; i < 200000; ++i) engine.process(w.next());
  EXPECT_LT(engine.metrics().max_retained_entries, 2000u);
  EXPECT_EQ(engine.metrics().events, 200000u);
}

TEST(WcpEngine, MetricsTrackQueueLoad) {
  WcpEngine engine;
  for (const Event& e : gen::fixture("fig1b").events) engine.process(e);
  EXPECT_EQ(engine.metrics().events, 8u);
  EXPECT_EQ(engine.metrics().max_queue_load, 2u);
}

TEST(WcpEngine, Deterministic) {
  gen::GenParams p;
  p.threads = 4;
  p.locks = 3;
  p.events = 200;
  p.seed = 99;
  const Trace t = gen::gen_random(p);
  EXPECT_EQ(stamps(t), stamps(t));
}

}  // namespace
}  // namespace wcp
