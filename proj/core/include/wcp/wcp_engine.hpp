#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "wcp/trace.hpp"
#include "wcp/vector_time.hpp"

namespace wcp {

/// Internal consistency failure of an engine (input violates lock semantics,
/// nesting, or fork/join preconditions).
class EngineError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct WcpEngineOptions {
  /// Drop per-lock history entries that every thread has consumed. Requires
  /// `thread_universe`, since a thread first seen later must see the whole
  /// history.
  bool gc_history = false;
  /// Total number of threads, when known before processing starts. Events of
  /// threads outside the universe are rejected.
  std::optional<std::size_t> thread_universe;
  /// Index of each thread's final event, when known (two-pass mode). Lets
  /// history collection skip threads that are done. SectionMap::kNoEvent marks
  /// a thread of the universe that has no events.
  std::vector<EventIdx> last_event_of_thread;
};

struct WcpMetrics {
  std::uint64_t events = 0;
  std::uint64_t queue_load = 0;      // current total of undrained foreign entries
  std::uint64_t max_queue_load = 0;  // maximum of queue_load over time
  std::uint64_t retained_entries = 0;
  std::uint64_t max_retained_entries = 0;
};

/// Streaming WCP timestamping.
///
/// Each processed event e is assigned C_e such that for a earlier than b,
/// a <=WCP b exactly when C_a <= C_b. Per thread the engine keeps the local
/// clock N, the predecessor clock P (knowledge of strictly WCP-earlier
/// events) and the happens-before clock H; per lock the P and H of the last
/// release, a release clock per (lock, variable) for reads and writes inside
/// sections, and a history of completed critical sections.
///
/// The history is one append-only log per lock with a cursor per thread. It
/// stands in for a pair of FIFO queues per (lock, thread): a thread skips its
/// own entries, and at each of its releases of the lock consumes foreign
/// entries from its cursor for as long as the entry's acquire time is below
/// the thread's current time, joining the entry's release time into P.
class WcpEngine {
 public:
  explicit WcpEngine(WcpEngineOptions options = {});

  /// Processes the next event in trace order and returns its timestamp C_e.
  /// The reference stays valid until the next call.
  const VectorTime& process(const Event& e);

  const VectorTime& acquire(ThreadId t, LockId lock);
  const VectorTime& release(ThreadId t, LockId lock);
  const VectorTime& read(ThreadId t, VarId x);
  const VectorTime& write(ThreadId t, VarId x);
  const VectorTime& fork(ThreadId t, ThreadId child);
  const VectorTime& join(ThreadId t, ThreadId child);

  /// P and H of thread t's last processed event.
  const VectorTime& predecessor_time(ThreadId t) const { return threads_.at(t).p; }
  const VectorTime& hb_time(ThreadId t) const { return threads_.at(t).h; }
  Tick local_time(ThreadId t) const { return threads_.at(t).local; }
  VectorTime current_time(ThreadId t) const;

  std::size_t num_threads() const { return threads_.size(); }
  const WcpMetrics& metrics() const { return metrics_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

  /// Retained history entries of one lock (after collection) and the
  /// per-thread position within it; exposed for invariant checks.
  std::size_t history_size(LockId lock) const;
  std::size_t cursor(LockId lock, ThreadId t) const;

 private:
  struct Section {
    LockId lock;
    std::size_t entry;  // absolute position of this section's history entry
    std::vector<VarId> reads;
    std::vector<VarId> writes;
  };

  struct ThreadState {
    bool active = false;
    bool finished = false;
    bool pending_increment = false;
    Tick local = 1;
    VectorTime p;
    VectorTime h;
    std::vector<Section> sections;
  };

  struct HistoryEntry {
    ThreadId owner;
    VectorTime acq_time;
    std::optional<VectorTime> rel_time;
  };

  struct LockState {
    VectorTime p;
    VectorTime h;
    std::optional<ThreadId> holder;
    std::deque<HistoryEntry> history;
    std::size_t base = 0;         // absolute position of history.front()
    std::vector<std::size_t> cursor;  // absolute positions, per thread
  };

  /// H of the last release of a lock by `owner` whose section accessed the
  /// variable. A thread's H only grows, so the last release subsumes earlier ones.
  struct Contribution {
    ThreadId owner;
    VectorTime h;
  };

  /// Release times per (lock, variable), kept per releasing thread: an access
  /// only conflicts with sections of other threads.
  struct ReleaseClocks {
    std::vector<Contribution> reads;
    std::vector<Contribution> writes;
  };

  static void contribute(std::vector<Contribution>& into, ThreadId owner, const VectorTime& h);
  static void join_foreign(VectorTime& p, const std::vector<Contribution>& from, ThreadId t);

  ThreadState& begin_event(ThreadId t);
  ThreadState& touch_thread(ThreadId t);
  LockState& lock_state(LockId lock);
  const VectorTime& capture(ThreadId t);
  void drain(ThreadId t, LockState& ls);
  void collect(LockState& ls);
  void finish_thread(ThreadId t);
  static std::uint64_t key(LockId lock, VarId x) { return (std::uint64_t{lock} << 32) | x; }

  WcpEngineOptions options_;
  std::vector<ThreadState> threads_;
  std::vector<LockState> locks_;
  std::unordered_map<std::uint64_t, ReleaseClocks> release_clocks_;
  std::vector<std::uint64_t> pending_;  // undrained foreign entries per thread
  std::uint64_t acquires_ = 0;
  std::vector<VarId> scratch_;
  VectorTime current_;
  WcpMetrics metrics_;
  std::vector<std::string> warnings_;
};

}  // namespace wcp
