#include <algorithm>
#include <set>

#include <gtest/gtest.h>

#include "wcp/race_reporter.hpp"
#include "wcp/trace_io.hpp"
#include "wcp/tracegen.hpp"
#include "wcp/wcp_engine.hpp"

namespace wcp {
namespace {

std::set<std::pair<std::string, std::string>> loc_pairs(const Trace& t, Detector d) {
  std::set<std::pair<std::string, std::string>> out;
  for (const RacePair& p : resolve_pairs(t, detect_flags(t, d), d).pairs) out.emplace(p.loc_a, p.loc_b);
  return out;
}

TEST(AccessClocks, ReadFlagsOnlyAgainstWrites) {
  AccessClocks clocks;
  const Trace t = parse_trace("T1|r|x\nT2|r|x\nT2|w|x\nT1|r|x\n");
  EXPECT_FALSE(clocks.check_access(t.events[0], VectorTime{1}));
  EXPECT_FALSE(clocks.check_access(t.events[1], VectorTime{0, 1}));
  const auto f = clocks.check_access(t.events[2], VectorTime{0, 1});
  ASSERT_TRUE(f);
  EXPECT_EQ(f->idx, 2u);
  EXPECT_EQ(clocks.writes(0), (VectorTime{0, 1}));
  EXPECT_EQ(clocks.reads(0), (VectorTime{1, 1}));
  EXPECT_TRUE(clocks.check_access(t.events[3], VectorTime{2}));
}

TEST(AccessClocks, FreshVariableNeverFlags) {
  AccessClocks clocks;
  const Trace t = parse_trace("T1|w|a\nT2|w|b\n");
  EXPECT_FALSE(clocks.check_access(t.events[0], VectorTime{}));
  EXPECT_FALSE(clocks.check_access(t.events[1], VectorTime{}));
}

TEST(AccessClocks, FlaggedAccessStillFolds) {
  AccessClocks clocks;
  const Trace t = parse_trace("T1|w|x\nT2|w|x\n");
  clocks.check_access(t.events[0], VectorTime{1});
  ASSERT_TRUE(clocks.check_access(t.events[1], VectorTime{0, 1}));
  EXPECT_EQ(clocks.writes(0), (VectorTime{1, 1}));
}

TEST(DetectFlags, UnorderedReadIsFlagged) {
  const auto flags = detect_flags(gen::fixture("fig1b"), Detector::Wcp);
  ASSERT_EQ(flags.size(), 1u);
  EXPECT_EQ(flags[0].idx, 7u);
  EXPECT_EQ(gen::fixture("fig1b").symbols.vars.name(flags[0].var), "y");
  EXPECT_TRUE(detect_flags(gen::fixture("fig1b"), Detector::Hb).empty());
}

TEST(DetectFlags, OrderedReadIsNotFlagged) {
  EXPECT_TRUE(detect_flags(gen::fixture("fig2a"), Detector::Wcp).empty());
}

TEST(ResolvePairs, SinglePair) {
  const Trace& t = gen::fixture("fig1b");
  const auto report = resolve_pairs(t, detect_flags(t, Detector::Wcp), Detector::Wcp);
  ASSERT_EQ(report.pairs.size(), 1u);
  const RacePair& p = report.pairs[0];
  EXPECT_EQ(p.loc_a, "fig1b:1");
  EXPECT_EQ(p.loc_b, "fig1b:8");
  EXPECT_EQ(p.count, 1u);
  EXPECT_EQ(p.min_distance(), 7u);
  EXPECT_TRUE(p.sound);
  EXPECT_EQ(format_race(p, Detector::Wcp), "RACE|wcp|fig1b:1|fig1b:8|count=1|mindist=7|ex=0,7|sound=1");
}

TEST(ResolvePairs, SectionReadRaceUnderWcpOnly) {
  const Trace& t = gen::fixture("fig4");
  const auto wcp = loc_pairs(t, Detector::Wcp);
  EXPECT_EQ(wcp, (std::set<std::pair<std::string, std::string>>{{"fig4:4", "fig4:15"}}));
  EXPECT_TRUE(loc_pairs(t, Detector::Hb).empty());
}

TEST(ResolvePairs, NoFlagsNoPairs) {
  const Trace& t = gen::fixture("fig1a");
  EXPECT_TRUE(resolve_pairs(t, {}, Detector::Wcp).pairs.empty());
}

TEST(ResolvePairs, LocationsOrderedByNumericValue) {
  const auto pairs = loc_pairs(gen::fixture("fig3"), Detector::Wcp);
  ASSERT_EQ(pairs.size(), 1u);
  EXPECT_EQ(pairs.begin()->first, "fig3:3");
  EXPECT_EQ(pairs.begin()->second, "fig3:12");
}

TEST(ResolvePairs, CountsAndMinimumDistance) {
  const Trace t = parse_trace("T1|w|x|A\nT1|w|x|A\nT2|w|x|B\nT2|w|x|B\n");
  const auto report = resolve_pairs(t, detect_flags(t, Detector::Hb), Detector::Hb);
  ASSERT_EQ(report.pairs.size(), 1u);
  EXPECT_EQ(report.pairs[0].count, 4u);
  EXPECT_EQ(report.pairs[0].min_distance(), 1u);
  EXPECT_EQ(report.pairs[0].example_first, 1u);
  EXPECT_EQ(report.pairs[0].example_second, 2u);
}

TEST(ResolvePairs, OnlyFirstWcpPairIsMarkedSound) {
  const Trace t = parse_trace("T1|w|x|A\nT2|w|x|B\nT1|w|y|C\nT2|w|y|D\n");
  const auto wcp = resolve_pairs(t, detect_flags(t, Detector::Wcp), Detector::Wcp);
  ASSERT_EQ(wcp.pairs.size(), 2u);
  EXPECT_TRUE(wcp.pairs[0].sound);
  EXPECT_FALSE(wcp.pairs[1].sound);
  const auto hb = resolve_pairs(t, detect_flags(t, Detector::Hb), Detector::Hb);
  EXPECT_TRUE(std::all_of(hb.pairs.begin(), hb.pairs.end(), [](const RacePair& p) { return p.sound; }));
}

TEST(ResolvePairs, BudgetDegradesToFlags) {
  const Trace t = parse_trace("T1|w|x|A\nT2|w|x|B\nT3|w|x|C\n");
  const auto flags = detect_flags(t, Detector::Wcp);
  ASSERT_EQ(flags.size(), 2u);
  const auto report = resolve_pairs(t, flags, Detector::Wcp, 1);
  EXPECT_EQ(report.pairs.size(), 1u);
  EXPECT_EQ(report.degraded_vars, std::vector<VarId>{0});
  ASSERT_EQ(report.degraded_flags.size(), 1u);
  EXPECT_EQ(report.degraded_flags[0].idx, 2u);
  EXPECT_EQ(report.warnings.size(), 1u);

  const auto full = resolve_pairs(t, flags, Detector::Wcp);
  EXPECT_EQ(full.pairs.size(), 3u);
  EXPECT_TRUE(full.degraded_flags.empty());
}

TEST(ResolvePairs, Idempotent) {
  gen::GenParams p;
  p.threads = 4;
  p.locks = 2;
  p.events = 120;
  p.seed = 5;
  const Trace t = gen::gen_random(p);
  const auto flags = detect_flags(t, Detector::Wcp);
  const auto a = resolve_pairs(t, flags, Detector::Wcp);
  const auto b = resolve_pairs(t, flags, Detector::Wcp);
  ASSERT_EQ(a.pairs.size(), b.pairs.size());
  for (std::size_t i = 0; i < a.pairs.size(); ++i) {
    EXPECT_EQ(format_race(a.pairs[i], Detector::Wcp), format_race(b.pairs[i], Detector::Wcp));
  }
}

TEST(ResolvePairs, HbPairsAreWcpPairs) {
  for (const auto& [name, trace] : gen::fixtures()) {
    const auto hb = loc_pairs(trace, Detector::Hb);
    const auto wcp = loc_pairs(trace, Detector::Wcp);
    EXPECT_TRUE(std::includes(wcp.begin(), wcp.end(), hb.begin(), hb.end())) << name;
  }
}

}  // namespace
}  // namespace wcp
