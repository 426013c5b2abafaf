#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "wcp/vector_time.hpp"

namespace wcp {

enum class EventKind : std::uint8_t { Acquire, Release, Read, Write, Fork, Join };

using LockId = std::uint32_t;
using VarId = std::uint32_t;
using LocId = std::uint32_t;
using EventIdx = std::uint32_t;

inline constexpr LocId kNoLoc = std::numeric_limits<LocId>::max();

/// One trace record. `operand` is a lock for Acquire/Release, a variable for
/// Read/Write and the child thread for Fork/Join.
struct Event {
  EventIdx idx = 0;
  ThreadId tid = 0;
  EventKind kind = EventKind::Read;
  std::uint32_t operand = 0;
  LocId loc = kNoLoc;

  bool is_access() const { return kind == EventKind::Read || kind == EventKind::Write; }
  bool is_lock_op() const { return kind == EventKind::Acquire || kind == EventKind::Release; }

  friend bool operator==(const Event&, const Event&) = default;
};

std::string_view kind_token(EventKind kind);

/// Interns names into dense indices. Indices are assigned in first-seen order.
class SymbolTable {
 public:
  std::uint32_t intern(std::string_view name);
  std::uint32_t find(std::string_view name) const;  // npos if absent
  const std::string& name(std::uint32_t id) const { return names_[id]; }
  std::size_t size() const { return names_.size(); }

  static constexpr std::uint32_t npos = std::numeric_limits<std::uint32_t>::max();

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::uint32_t> index_;
};

/// Name tables for the four disjoint id namespaces of a trace.
struct Symbols {
  SymbolTable threads;
  SymbolTable locks;
  SymbolTable vars;
  SymbolTable locs;

  /// Program location of `e`; absent locations render as `idx:<idx>`.
  std::string location(const Event& e) const;
  const std::string& operand_name(const Event& e) const;
};

/// True iff both events access the same variable from different threads and at
/// least one of them writes.
bool conflicting(const Event& a, const Event& b);

struct Trace {
  std::vector<Event> events;
  Symbols symbols;

  std::size_t num_events() const { return events.size(); }
  std::size_t num_threads() const { return symbols.threads.size(); }
  std::size_t num_locks() const { return symbols.locks.size(); }
  std::size_t num_vars() const { return symbols.vars.size(); }

  /// Appends by name; assigns the next idx. Used by generators and tests.
  Event& add(std::string_view tid, EventKind kind, std::string_view operand,
             std::string_view loc = {});
};

/// Critical-section structure of a (validated) trace.
///
/// `match[i]` is the matching release of acquire i (or the matching acquire of
/// release i); `kNoEvent` when absent. `enclosing[i]` lists the locks of the
/// sections open in `events[i].tid` when event i executes, outermost first;
/// lock events do not list their own lock.
struct SectionMap {
  static constexpr EventIdx kNoEvent = std::numeric_limits<EventIdx>::max();

  std::vector<EventIdx> match;
  std::vector<std::vector<LockId>> enclosing;

  /// First and last event (inclusive) of the critical section started or ended
  /// by lock event `e`; unmatched acquires extend to their thread's last event.
  std::pair<EventIdx, EventIdx> span(const Trace& trace, EventIdx e) const;
  std::vector<EventIdx> last_of_thread;
};

SectionMap compute_sections(const Trace& trace);

}  // namespace wcp
