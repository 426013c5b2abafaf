#include "wcp/validate.hpp"

#include <algorithm>

namespace wcp {

namespace {

std::uint64_t key(ThreadId t, LockId l) { return (std::uint64_t{t} << 32) | l; }

}  // namespace

std::string_view violation_name(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::DoubleAcquire: return "DoubleAcquire";
    case ViolationKind::UnmatchedRelease: return "UnmatchedRelease";
    case ViolationKind::BadNesting: return "BadNesting";
    case ViolationKind::ReentrantFlattened: return "ReentrantFlattened";
    case ViolationKind::DanglingCriticalSection: return "DanglingCriticalSection";
    case ViolationKind::ForkOfKnownThread: return "ForkOfKnownThread";
    case ViolationKind::JoinOfLiveThread: return "JoinOfLiveThread";
  }
  return "?";
}

bool is_error(ViolationKind kind) {
  return kind != ViolationKind::ReentrantFlattened &&
         kind != ViolationKind::DanglingCriticalSection;
}

std::size_t ValidationReport::error_count() const {
  return static_cast<std::size_t>(std::count_if(
      violations.begin(), violations.end(), [](const Violation& v) { return is_error(v.kind); }));
}

std::size_t ValidationReport::warning_count() const {
  return violations.size() - error_count();
}

Validator::ThreadInfo& Validator::thread(ThreadId t) {
  if (t >= threads_.size()) threads_.resize(t + 1);
  return threads_[t];
}

void Validator::add(EventIdx idx, ViolationKind kind, std::string message) {
  if (is_error(kind)) {
    ++errors_;
    report_.ok = false;
  }
  report_.violations.push_back({idx, kind, std::move(message)});
}

bool Validator::observe(const Event& e) {
  const std::string& tname = symbols_.threads.name(e.tid);
  {
    ThreadInfo& self = thread(e.tid);
    if (self.joined && !self.reported_live_after_join) {
      self.reported_live_after_join = true;
      add(e.idx, ViolationKind::JoinOfLiveThread,
          "thread " + tname + " has events after being joined");
    }
    self.seen = true;
  }

  switch (e.kind) {
    case EventKind::Acquire: {
      const std::string& lname = symbols_.locks.name(e.operand);
      auto& depth = depth_[key(e.tid, e.operand)];
      if (depth > 0) {
        ++depth;
        ++report_.flattened;
        add(e.idx, ViolationKind::ReentrantFlattened,
            "re-entrant acquire of " + lname + " by " + tname + " flattened");
        return false;
      }
      auto h = holder_.find(e.operand);
      if (h != holder_.end()) {
        add(e.idx, ViolationKind::DoubleAcquire,
            "lock " + lname + " acquired by " + tname + " while held by " +
                symbols_.threads.name(h->second));
      }
      depth = 1;
      holder_[e.operand] = e.tid;
      thread(e.tid).open.emplace_back(e.operand, e.idx);
      return true;
    }
    case EventKind::Release: {
      const std::string& lname = symbols_.locks.name(e.operand);
      auto it = depth_.find(key(e.tid, e.operand));
      if (it == depth_.end() || it->second == 0) {
        add(e.idx, ViolationKind::UnmatchedRelease,
            "release of " + lname + " by " + tname + " without a matching acquire");
        return false;
      }
      if (it->second > 1) {
        --it->second;
        return false;
      }
      it->second = 0;
      auto& open = thread(e.tid).open;
      if (open.back().first != e.operand) {
        add(e.idx, ViolationKind::BadNesting,
            "release of " + lname + " by " + tname + " while inner section on " +
                symbols_.locks.name(open.back().first) + " is open");
      }
      auto pos = std::find_if(open.rbegin(), open.rend(),
                              [&](const auto& f) { return f.first == e.operand; });
      open.erase(std::next(pos).base());
      auto h = holder_.find(e.operand);
      if (h != holder_.end() && h->second == e.tid) holder_.erase(h);
      return true;
    }
    case EventKind::Fork: {
      ThreadInfo& child = thread(e.operand);
      if (e.operand == e.tid || child.seen || child.forked) {
        add(e.idx, ViolationKind::ForkOfKnownThread,
            "fork of already known thread " + symbols_.threads.name(e.operand));
      }
      child.forked = true;
      return true;
    }
    case EventKind::Join: {
      ThreadInfo& child = thread(e.operand);
      if (e.operand == e.tid) {
        add(e.idx, ViolationKind::JoinOfLiveThread, "thread " + tname + " joins itself");
      }
      child.joined = true;
      return true;
    }
    case EventKind::Read:
    case EventKind::Write: return true;
  }
  return true;
}

ValidationReport Validator::finish() {
  ValidationReport out = report_;
  for (ThreadId t = 0; t < threads_.size(); ++t) {
    for (const auto& [lock, acq] : threads_[t].open) {
      out.violations.push_back({acq, ViolationKind::DanglingCriticalSection,
                                "critical section on " + symbols_.locks.name(lock) + " by " +
                                    symbols_.threads.name(t) + " still open at end of trace"});
    }
  }
  std::stable_sort(out.violations.begin(), out.violations.end(),
                   [](const Violation& a, const Violation& b) { return a.idx < b.idx; });
  return out;
}

ValidationReport validate(const Trace& trace) {
  Validator v(trace.symbols);
  for (const Event& e : trace.events) v.observe(e);
  return v.finish();
}

Trace flatten_reentrant(const Trace& trace) {
  Trace out;
  out.symbols = trace.symbols;
  Validator v(trace.symbols);
  for (const Event& e : trace.events) {
    if (!v.observe(e)) continue;
    Event copy = e;
    copy.idx = static_cast<EventIdx>(out.events.size());
    out.events.push_back(copy);
  }
  return out;
}

}  // namespace wcp
