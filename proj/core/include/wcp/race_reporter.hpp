#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "wcp/trace.hpp"
#include "wcp/vector_time.hpp"

namespace wcp {

enum class Detector : std::uint8_t { Wcp, Hb };

std::string_view detector_name(Detector d);

/// Second component of a race: an access unordered with some earlier
/// conflicting access.
struct Flag {
  EventIdx idx = 0;
  VarId var = 0;
  EventKind kind = EventKind::Read;
  ThreadId tid = 0;
  LocId loc = kNoLoc;
};

/// Per-variable joins of the timestamps of all reads and writes so far.
class AccessClocks {
 public:
  /// Checks access `e` with timestamp `c` against earlier accesses, then folds
  /// `c` into the clocks. A read races with an unordered earlier write; a write
  /// with any unordered earlier access.
  std::optional<Flag> check_access(const Event& e, const VectorTime& c);

  const VectorTime& reads(VarId x) const;
  const VectorTime& writes(VarId x) const;

 private:
  std::vector<VectorTime> reads_;
  std::vector<VectorTime> writes_;
};

/// A race deduplicated by its unordered pair of program locations.
struct RacePair {
  std::string loc_a;  // loc_a before loc_b, comparing digit runs by value
  std::string loc_b;
  std::uint64_t count = 0;
  EventIdx example_first = 0;  // example witness with minimum distance
  EventIdx example_second = 0;
  bool sound = false;

  EventIdx min_distance() const { return example_second - example_first; }
};

struct PairReport {
  std::vector<RacePair> pairs;
  /// Variables whose retained accesses exceeded the budget; only flags are
  /// reported for them.
  std::vector<VarId> degraded_vars;
  std::vector<Flag> degraded_flags;
  std::vector<std::string> warnings;
};

/// Replays `trace` through a fresh engine of kind `detector` and resolves
/// each flag into the full set of earlier accesses it races with. Pairs are
/// ordered by their first witness; for WCP only the very first pair carries the
/// soundness guarantee, for HB every pair does.
PairReport resolve_pairs(const Trace& trace, const std::vector<Flag>& flags, Detector detector,
                         std::size_t pair_budget = 10'000'000);

/// Pass one: flags of every access of `trace` under `detector`.
std::vector<Flag> detect_flags(const Trace& trace, Detector detector);

/// `RACE|<detector>|<locA>|<locB>|count=<n>|mindist=<d>|ex=<i1>,<i2>|sound=<0|1>`
std::string format_race(const RacePair& pair, Detector detector);

}  // namespace wcp
