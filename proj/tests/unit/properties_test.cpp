// Differential and invariant checks of the streaming engines against the
// brute-force oracle and the exhaustive reordering explorer.
#include <gtest/gtest.h>

#include "support/corpus.hpp"
#include "support/reordering.hpp"
#include "wcp/hb_engine.hpp"
#include "wcp/oracle.hpp"
#include "wcp/race_reporter.hpp"
#include "wcp/tracegen.hpp"
#include "wcp/wcp_engine.hpp"

namespace wcp {
namespace {

constexpr std::size_t kUnitCorpus = 300;

std::vector<VectorTime> wcp_stamps(const Trace& t) {
  WcpEngine engine;
  std::vector<VectorTime> out;
  for (const Event& e : t.events) out.push_back(engine.process(e));
  return out;
}

std::vector<VectorTime> hb_stamps(const Trace& t) {
  HbEngine engine;
  std::vector<VectorTime> out;
  for (const Event& e : t.events) out.push_back(engine.process(e));
  return out;
}

std::size_t mismatches(const std::vector<VectorTime>& c, const oracle::OrderRelation& rel) {
  std::size_t bad = 0;
  for (std::size_t a = 0; a < c.size(); ++a)
    for (std::size_t b = a + 1; b < c.size(); ++b) bad += leq(c[a], c[b]) != rel.test(a, b);
  return bad;
}

std::vector<Trace> suite() {
  std::vector<Trace> out;
  for (const auto& [name, t] : gen::fixtures()) out.push_back(t);
  for (std::size_t i = 0; i < kUnitCorpus; ++i) out.push_back(testing::corpus_trace(i));
  return out;
}

TEST(Properties, WcpTimestampsMatchOracle) {
  for (const Trace& t : suite()) {
    const auto r = oracle::compute_all(t);
    ASSERT_EQ(mismatches(wcp_stamps(t), r.wcp_le), 0u);
  }
}

TEST(Properties, HbTimestampsMatchOracle) {
  for (const Trace& t : suite()) ASSERT_EQ(mismatches(hb_stamps(t), oracle::hb_closure(t)), 0u);
}

TEST(Properties, ForkJoinTracesMatchOracle) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    gen::GenParams p;
    p.threads = 2 + seed % 3;
    p.locks = 1 + seed % 3;
    p.vars = 2;
    p.events = 30;
    p.fork_join = true;
    p.seed = seed;
    const Trace t = gen::gen_random(p);
    const auto r = oracle::compute_all(t);
    ASSERT_EQ(mismatches(wcp_stamps(t), r.wcp_le), 0u) << seed;
    ASSERT_EQ(mismatches(hb_stamps(t), r.hb), 0u) << seed;
  }
}

TEST(Properties, EngineInvariants) {
  for (const Trace& t : suite()) {
    WcpEngine engine;
    std::vector<VectorTime> last_c(t.num_threads()), last_p(t.num_threads()), last_h(t.num_threads());
    for (const Event& e : t.events) {
      const VectorTime c = engine.process(e);
      const VectorTime& p = engine.predecessor_time(e.tid);
      const VectorTime& h = engine.hb_time(e.tid);
      ASSERT_TRUE(leq(p, c));
      ASSERT_TRUE(leq(c, h));
      ASSERT_TRUE(leq(last_c[e.tid], c));
      ASSERT_TRUE(leq(last_p[e.tid], p));
      ASSERT_TRUE(leq(last_h[e.tid], h));
      last_c[e.tid] = c;
      last_p[e.tid] = p;
      last_h[e.tid] = h;
    }
  }
}

TEST(Properties, FlagsMatchOracleRaces) {
  for (const Trace& t : suite()) {
    const auto races = oracle::races_of(t, oracle::compute_all(t).wcp_le);
    std::set<EventIdx> second;
    for (const auto& [a, b] : races) second.insert(b);
    std::set<EventIdx> flagged;
    for (const Flag& f : detect_flags(t, Detector::Wcp)) flagged.insert(f.idx);
    ASSERT_EQ(flagged, second);
  }
}

TEST(Properties, PairsMatchOracleRaces) {
  for (const Trace& t : suite()) {
    const auto races = oracle::races_of(t, oracle::compute_all(t).wcp_le);
    std::set<std::pair<std::string, std::string>> expected;
    for (const auto& [a, b] : races) {
      std::string la = t.symbols.location(t.events[a]);
      std::string lb = t.symbols.location(t.events[b]);
      if (lb < la) std::swap(la, lb);
      expected.emplace(la, lb);
    }
    std::set<std::pair<std::string, std::string>> got;
    const auto report = resolve_pairs(t, detect_flags(t, Detector::Wcp), Detector::Wcp);
    for (const RacePair& p : report.pairs) got.emplace(std::min(p.loc_a, p.loc_b), std::max(p.loc_a, p.loc_b));
    ASSERT_EQ(got, expected);
  }
}

TEST(Properties, HbReportIsSubsetOfWcp) {
  for (const Trace& t : suite()) {
    std::set<std::pair<std::string, std::string>> hb, wcp;
    for (const RacePair& p : resolve_pairs(t, detect_flags(t, Detector::Hb), Detector::Hb).pairs)
      hb.emplace(p.loc_a, p.loc_b);
    for (const RacePair& p : resolve_pairs(t, detect_flags(t, Detector::Wcp), Detector::Wcp).pairs)
      wcp.emplace(p.loc_a, p.loc_b);
    ASSERT_TRUE(std::includes(wcp.begin(), wcp.end(), hb.begin(), hb.end()));
  }
}

// The first WCP race implies a predictable race or a predictable deadlock; the
// first HB race is a predictable race.
TEST(Properties, ReportedRacesAreWitnessed) {
  std::size_t checked = 0;
  for (std::size_t i = 0; i < kUnitCorpus; ++i) {
    const Trace t = testing::corpus_trace(i);
    if (t.num_events() > 30) continue;
    const auto r = oracle::compute_all(t);
    const auto wcp_races = oracle::races_of(t, r.wcp_le);
    const auto hb_races = oracle::races_of(t, r.hb);
    if (wcp_races.empty()) continue;
    const auto ex = testing::explore_reorderings(t);
    ASSERT_TRUE(!ex.races.empty() || ex.deadlock) << i;
    if (!hb_races.empty()) {
      // Earliest second event, and its closest partner.
      auto first = hb_races.front();
      for (const auto& pr : hb_races)
        if (pr.second < first.second || (pr.second == first.second && pr.first > first.first)) first = pr;
      ASSERT_TRUE(ex.races.count(first)) << i;
    }
    ++checked;
  }
  EXPECT_GT(checked, 20u);
}

}  // namespace
}  // namespace wcp
