#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "wcp/trace.hpp"

namespace wcp::gen {

/// The small hand-written example traces, keyed fig1a, fig1b, fig2a, fig2b,
/// fig3, fig4, fig5 and fig7. Each event's location is `<name>:<line>`.
/// `sync(x)` lines expand to acq(x) r(xVar) w(xVar) rel(x) and `acrl(y)` lines
/// to acq(y) rel(y); the expanded events share the line's location.
const std::map<std::string, Trace>& fixtures();

/// Throws std::out_of_range for unknown names.
const Trace& fixture(std::string_view name);

class LengthMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Three-thread trace over locks l0, l1, m and y whose two writes of `z` are
/// WCP-ordered exactly when u == v. Thread t1 runs one section per bit of u,
/// thread t3 a chain of m-sections interleaved with it, and thread t2 one
/// section per bit of v followed by an m-section each. Bits choose between
/// locks l0 and l1.
///
/// Throws LengthMismatch if |u| != |v|, std::invalid_argument for empty
/// input or characters other than 0/1.
Trace gen_equality_trace(std::string_view u, std::string_view v);

/// Index of the first and the second write of z in an equality trace.
std::pair<EventIdx, EventIdx> equality_writes(const Trace& trace);

struct GenParams {
  std::uint32_t threads = 2;
  std::uint32_t locks = 1;
  std::uint32_t vars = 2;
  std::uint32_t events = 20;
  double p_lock = 0.3;   // chance a step is a lock operation
  double p_write = 0.5;  // chance an access is a write
  std::uint32_t max_nesting = 2;
  std::uint64_t seed = 0;
  /// Leave sections open at the end instead of closing them.
  bool dangling = false;
  /// t0 forks every other thread first and joins them at the end. The fork
  /// and join events come on top of `events`.
  bool fork_join = false;

  /// Throws std::invalid_argument when out of range.
  void check() const;
};

/// Random well-formed trace with at most `events` events. Deterministic in
/// the seed. Critical sections end with probability 0.4 per step, so they are
/// short and frequently contend.
Trace gen_random(const GenParams& params);

/// Unbounded stream of events over `threads` threads and `locks` locks. Each
/// lock guards its own variable, written in every section of that lock;
/// sections are interleaved with thread-local accesses.
class ScalingWorkload {
 public:
  ScalingWorkload(std::uint32_t threads, std::uint32_t locks, std::uint64_t seed);

  Event next();

  const Symbols& symbols() const { return symbols_; }
  std::uint64_t emitted() const { return next_idx_; }

 private:
  void refill(std::uint32_t t);

  std::uint32_t threads_;
  std::uint32_t locks_;
  std::mt19937_64 rng_;
  Symbols symbols_;
  std::vector<std::vector<Event>> scripts_;  // pending events per thread, reversed
  std::vector<bool> held_;
  EventIdx next_idx_ = 0;
};

}  // namespace wcp::gen
