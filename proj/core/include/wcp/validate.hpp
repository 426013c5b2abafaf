#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "wcp/trace.hpp"

namespace wcp {

enum class ViolationKind : std::uint8_t {
  DoubleAcquire,
  UnmatchedRelease,
  BadNesting,
  ReentrantFlattened,
  DanglingCriticalSection,
  ForkOfKnownThread,
  JoinOfLiveThread,
};

std::string_view violation_name(ViolationKind kind);

/// ReentrantFlattened and DanglingCriticalSection are warnings; the rest are errors.
bool is_error(ViolationKind kind);

struct Violation {
  EventIdx idx = 0;
  ViolationKind kind = ViolationKind::DoubleAcquire;
  std::string message;
};

struct ValidationReport {
  bool ok = true;
  std::vector<Violation> violations;
  std::size_t flattened = 0;  // re-entrant acquire/release pairs dropped

  std::size_t error_count() const;
  std::size_t warning_count() const;
};

/// Streaming well-formedness checker and re-entrancy flattener.
///
/// Re-entrant locking keeps a per (thread, lock) depth: only the 0->1 acquire
/// and the 1->0 release are logical events, inner pairs are dropped with a
/// warning. `observe` returns whether the event belongs to the logical trace.
class Validator {
 public:
  explicit Validator(const Symbols& symbols) : symbols_(symbols) {}

  bool observe(const Event& e);
  ValidationReport finish();

  /// Errors recorded so far (without end-of-trace warnings).
  bool has_error() const { return errors_ > 0; }
  const std::vector<Violation>& violations() const { return report_.violations; }

 private:
  struct ThreadInfo {
    bool seen = false;
    bool forked = false;
    bool joined = false;
    bool reported_live_after_join = false;
    std::vector<std::pair<LockId, EventIdx>> open;  // logical sections, outermost first
  };

  ThreadInfo& thread(ThreadId t);
  void add(EventIdx idx, ViolationKind kind, std::string message);

  const Symbols& symbols_;
  ValidationReport report_;
  std::size_t errors_ = 0;
  std::vector<ThreadInfo> threads_;
  std::unordered_map<std::uint64_t, std::uint32_t> depth_;  // (thread, lock) -> depth
  std::unordered_map<LockId, ThreadId> holder_;
};

ValidationReport validate(const Trace& trace);

/// The logical trace: re-entrant inner pairs and unmatched releases removed,
/// events renumbered consecutively.
Trace flatten_reentrant(const Trace& trace);

}  // namespace wcp
