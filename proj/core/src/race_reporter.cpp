#include "wcp/race_reporter.hpp"

#include <map>
#include <unordered_map>

#include "wcp/hb_engine.hpp"
#include "wcp/wcp_engine.hpp"

namespace wcp {

namespace {

const VectorTime kBottom;

template <typename Fn>
void replay(const Trace& trace, Detector detector, Fn&& fn) {
  if (detector == Detector::Wcp) {
    WcpEngine engine;
    for (const Event& e : trace.events) fn(e, engine.process(e));
  } else {
    HbEngine engine;
    for (const Event& e : trace.events) fn(e, engine.process(e));
  }
}

/// Orders digit runs by value, so `f:3` sorts before `f:12`.
bool natural_less(const std::string& a, const std::string& b) {
  std::size_t i = 0;
  std::size_t j = 0;
  auto digit = [](char c) { return c >= '0' && c <= '9'; };
  while (i < a.size() && j < b.size()) {
    if (digit(a[i]) && digit(b[j])) {
      std::size_t ie = i;
      std::size_t je = j;
      while (ie < a.size() && digit(a[ie])) ++ie;
      while (je < b.size() && digit(b[je])) ++je;
      std::size_t ia = i;
      std::size_t jb = j;
      while (ia + 1 < ie && a[ia] == '0') ++ia;
      while (jb + 1 < je && b[jb] == '0') ++jb;
      if (ie - ia != je - jb) return ie - ia < je - jb;
      const int c = a.compare(ia, ie - ia, b, jb, je - jb);
      if (c != 0) return c < 0;
      i = ie;
      j = je;
      continue;
    }
    if (a[i] != b[j]) return a[i] < b[j];
    ++i;
    ++j;
  }
  if ((a.size() - i) != (b.size() - j)) return a.size() - i < b.size() - j;
  return a < b;
}

struct RetainedAccess {
  EventIdx idx;
  ThreadId tid;
  EventKind kind;
  VectorTime time;
};

}  // namespace

std::string_view detector_name(Detector d) { return d == Detector::Wcp ? "wcp" : "hb"; }

std::optional<Flag> AccessClocks::check_access(const Event& e, const VectorTime& c) {
  const VarId x = e.operand;
  if (x >= reads_.size()) {
    reads_.resize(x + 1);
    writes_.resize(x + 1);
  }
  bool race = !leq(writes_[x], c);
  if (e.kind == EventKind::Write) {
    race = race || !leq(reads_[x], c);
    writes_[x].join_with(c);
  } else {
    reads_[x].join_with(c);
  }
  if (!race) return std::nullopt;
  return Flag{e.idx, x, e.kind, e.tid, e.loc};
}

const VectorTime& AccessClocks::reads(VarId x) const {
  return x < reads_.size() ? reads_[x] : kBottom;
}

const VectorTime& AccessClocks::writes(VarId x) const {
  return x < writes_.size() ? writes_[x] : kBottom;
}

std::vector<Flag> detect_flags(const Trace& trace, Detector detector) {
  std::vector<Flag> flags;
  AccessClocks clocks;
  replay(trace, detector, [&](const Event& e, const VectorTime& c) {
    if (!e.is_access()) return;
    if (auto f = clocks.check_access(e, c)) flags.push_back(*f);
  });
  return flags;
}

PairReport resolve_pairs(const Trace& trace, const std::vector<Flag>& flags, Detector detector,
                         std::size_t pair_budget) {
  PairReport report;
  if (flags.empty()) return report;

  std::unordered_map<VarId, std::vector<RetainedAccess>> retained;
  std::vector<bool> flagged_event(trace.events.size(), false);
  for (const Flag& f : flags) {
    retained.try_emplace(f.var);
    flagged_event[f.idx] = true;
  }
  std::unordered_map<VarId, bool> degraded;
  std::size_t retained_total = 0;
  std::map<std::pair<std::string, std::string>, std::size_t> by_locs;

  replay(trace, detector, [&](const Event& e, const VectorTime& c) {
    if (!e.is_access()) return;
    auto it = retained.find(e.operand);
    if (it == retained.end()) return;
    if (degraded.count(e.operand)) {
      if (flagged_event[e.idx]) {
        report.degraded_flags.push_back(Flag{e.idx, e.operand, e.kind, e.tid, e.loc});
      }
      return;
    }
    auto& accesses = it->second;
    if (flagged_event[e.idx]) {
      const std::string loc2 = trace.symbols.location(e);
      for (auto a = accesses.rbegin(); a != accesses.rend(); ++a) {
        if (a->tid == e.tid) continue;
        if (a->kind != EventKind::Write && e.kind != EventKind::Write) continue;
        if (leq(a->time, c)) continue;
        std::string loc1 = trace.symbols.location(trace.events[a->idx]);
        auto key = natural_less(loc2, loc1) ? std::make_pair(loc2, loc1) : std::make_pair(loc1, loc2);
        auto [slot, inserted] = by_locs.try_emplace(std::move(key), report.pairs.size());
        if (inserted) {
          RacePair p;
          p.loc_a = slot->first.first;
          p.loc_b = slot->first.second;
          p.example_first = a->idx;
          p.example_second = e.idx;
          report.pairs.push_back(std::move(p));
        }
        RacePair& p = report.pairs[slot->second];
        ++p.count;
        if (e.idx - a->idx < p.min_distance()) {
          p.example_first = a->idx;
          p.example_second = e.idx;
        }
      }
    }
    if (retained_total >= pair_budget) {
      degraded[e.operand] = true;
      retained_total -= accesses.size();
      accesses.clear();
      accesses.shrink_to_fit();
      report.degraded_vars.push_back(e.operand);
      report.warnings.push_back("pair budget of " + std::to_string(pair_budget) +
                                " retained accesses exceeded on variable " +
                                trace.symbols.vars.name(e.operand) +
                                "; reporting flagged events only");
      return;
    }
    accesses.push_back({e.idx, e.tid, e.kind, c});
    ++retained_total;
  });

  if (!report.pairs.empty()) {
    if (detector == Detector::Hb) {
      for (RacePair& p : report.pairs) p.sound = true;
    } else {
      report.pairs.front().sound = true;
    }
  }
  return report;
}

std::string format_race(const RacePair& pair, Detector detector) {
  std::string out = "RACE|";
  out += detector_name(detector);
  out += '|' + pair.loc_a + '|' + pair.loc_b;
  out += "|count=" + std::to_string(pair.count);
  out += "|mindist=" + std::to_string(pair.min_distance());
  out += "|ex=" + std::to_string(pair.example_first) + ',' + std::to_string(pair.example_second);
  out += pair.sound ? "|sound=1" : "|sound=0";
  return out;
}

}  // namespace wcp
