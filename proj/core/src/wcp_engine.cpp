#include "wcp/wcp_engine.hpp"

#include <algorithm>
#include <limits>

namespace wcp {

namespace {

void dedupe(std::vector<VarId>& vars) {
  std::sort(vars.begin(), vars.end());
  vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
}

// Keeps per-section access sets from growing with repeated accesses.
void record_access(std::vector<VarId>& vars, VarId x) {
  if (!vars.empty() && vars.back() == x) return;
  vars.push_back(x);
  if (vars.size() >= 64 && (vars.size() & (vars.size() - 1)) == 0) dedupe(vars);
}

}  // namespace

WcpEngine::WcpEngine(WcpEngineOptions options) : options_(std::move(options)) {
  if (options_.gc_history && !options_.thread_universe) {
    throw std::invalid_argument("history collection requires a declared thread universe");
  }
  if (options_.thread_universe) {
    threads_.resize(*options_.thread_universe);
    pending_.assign(*options_.thread_universe, 0);
    // Threads without events never consume history.
    const auto& last = options_.last_event_of_thread;
    for (std::size_t t = 0; t < last.size() && t < threads_.size(); ++t) {
      if (last[t] == SectionMap::kNoEvent) threads_[t].finished = true;
    }
  }
}

WcpEngine::ThreadState& WcpEngine::touch_thread(ThreadId t) {
  if (t >= threads_.size()) {
    if (options_.thread_universe) {
      throw EngineError("thread index " + std::to_string(t) + " outside declared universe of " +
                        std::to_string(*options_.thread_universe));
    }
    // Threads first seen now have every earlier section queued as foreign.
    const std::size_t added = t + 1 - threads_.size();
    threads_.resize(t + 1);
    pending_.resize(t + 1, acquires_);
    metrics_.queue_load += added * acquires_;
    metrics_.max_queue_load = std::max(metrics_.max_queue_load, metrics_.queue_load);
  }
  ThreadState& ts = threads_[t];
  if (!ts.active) {
    ts.active = true;
    ts.local = 1;
    ts.h.set(t, 1);
  }
  return ts;
}

WcpEngine::ThreadState& WcpEngine::begin_event(ThreadId t) {
  ThreadState& ts = touch_thread(t);
  if (ts.finished) {
    throw EngineError("event of thread " + std::to_string(t) + " after its declared last event");
  }
  if (ts.pending_increment) {
    ts.pending_increment = false;
    ++ts.local;
    ts.h.set(t, ts.local);
  }
  return ts;
}

WcpEngine::LockState& WcpEngine::lock_state(LockId lock) {
  if (lock >= locks_.size()) locks_.resize(lock + 1);
  return locks_[lock];
}

const VectorTime& WcpEngine::capture(ThreadId t) {
  const ThreadState& ts = threads_[t];
  current_ = ts.p;
  current_.set(t, ts.local);
  return current_;
}

VectorTime WcpEngine::current_time(ThreadId t) const {
  const ThreadState& ts = threads_.at(t);
  return with_component(ts.p, t, ts.local);
}

const VectorTime& WcpEngine::acquire(ThreadId t, LockId lock) {
  ThreadState& ts = begin_event(t);
  LockState& ls = lock_state(lock);
  if (ls.holder) {
    throw EngineError("acquire of lock " + std::to_string(lock) + " by thread " +
                      std::to_string(t) + " while held by thread " + std::to_string(*ls.holder));
  }
  ts.h.join_with(ls.h);
  ts.p.join_with(ls.p);
  ls.holder = t;

  const VectorTime& c = capture(t);
  ls.history.push_back({t, c, std::nullopt});
  ts.sections.push_back({lock, ls.base + ls.history.size() - 1, {}, {}});

  ++acquires_;
  for (ThreadId u = 0; u < threads_.size(); ++u) {
    if (u == t || threads_[u].finished) continue;
    ++pending_[u];
    ++metrics_.queue_load;
  }
  metrics_.max_queue_load = std::max(metrics_.max_queue_load, metrics_.queue_load);
  ++metrics_.retained_entries;
  metrics_.max_retained_entries =
      std::max(metrics_.max_retained_entries, metrics_.retained_entries);
  return c;
}

void WcpEngine::drain(ThreadId t, LockState& ls) {
  if (ls.cursor.size() <= t) ls.cursor.resize(t + 1, 0);
  ThreadState& ts = threads_[t];
  std::size_t pos = ls.cursor[t];
  const std::size_t end = ls.base + ls.history.size();
  while (pos < end) {
    const HistoryEntry& entry = ls.history[pos - ls.base];
    const bool own = entry.owner == t;
    // The section being closed; nothing follows it while the lock is held.
    if (own && !entry.rel_time) break;
    // An earlier section is consumed once its acquire strictly precedes this
    // release. For another thread's acquire that is the same as being below
    // C_t; for an own acquire thread order does not count, so compare with
    // P_t. Both tests are monotone along the log. P_t changes with every join
    // below, so the test is re-evaluated each round.
    const bool precedes = own ? leq(entry.acq_time, ts.p)
                              : leq_with_override(entry.acq_time, ts.p, t, ts.local);
    if (!precedes) break;
    if (!entry.rel_time) {
      throw EngineError("history entry of thread " + std::to_string(entry.owner) +
                        " consumed before its release");
    }
    ts.p.join_with(*entry.rel_time);
    ++pos;
    if (!own) {
      --pending_[t];
      --metrics_.queue_load;
    }
  }
  ls.cursor[t] = pos;
}

void WcpEngine::collect(LockState& ls) {
  if (!options_.gc_history) return;
  const std::size_t end = ls.base + ls.history.size();
  std::size_t low = end;
  for (ThreadId u = 0; u < threads_.size(); ++u) {
    if (threads_[u].finished) continue;
    low = std::min(low, u < ls.cursor.size() ? ls.cursor[u] : std::size_t{0});
  }
  while (ls.base < low) {
    ls.history.pop_front();
    ++ls.base;
    --metrics_.retained_entries;
  }
}

const VectorTime& WcpEngine::release(ThreadId t, LockId lock) {
  ThreadState& ts = begin_event(t);
  if (ts.sections.empty() || ts.sections.back().lock != lock) {
    throw EngineError("release of lock " + std::to_string(lock) + " by thread " +
                      std::to_string(t) + " does not close its innermost section");
  }
  LockState& ls = lock_state(lock);
  drain(t, ls);

  Section section = std::move(ts.sections.back());
  ts.sections.pop_back();
  dedupe(section.reads);
  dedupe(section.writes);
  for (VarId x : section.reads) contribute(release_clocks_[key(lock, x)].reads, t, ts.h);
  for (VarId x : section.writes) contribute(release_clocks_[key(lock, x)].writes, t, ts.h);

  ls.h = ts.h;
  ls.p = ts.p;
  if (section.entry >= ls.base) ls.history[section.entry - ls.base].rel_time = ts.h;
  ls.holder.reset();

  // Accesses of an inner section are inside every enclosing section as well.
  if (!ts.sections.empty()) {
    Section& outer = ts.sections.back();
    outer.reads.insert(outer.reads.end(), section.reads.begin(), section.reads.end());
    outer.writes.insert(outer.writes.end(), section.writes.begin(), section.writes.end());
  }
  ts.pending_increment = true;
  collect(ls);
  return capture(t);
}

void WcpEngine::contribute(std::vector<Contribution>& into, ThreadId owner, const VectorTime& h) {
  for (Contribution& c : into) {
    if (c.owner == owner) {
      c.h = h;
      return;
    }
  }
  into.push_back({owner, h});
}

void WcpEngine::join_foreign(VectorTime& p, const std::vector<Contribution>& from, ThreadId t) {
  for (const Contribution& c : from) {
    if (c.owner != t) p.join_with(c.h);
  }
}

const VectorTime& WcpEngine::read(ThreadId t, VarId x) {
  ThreadState& ts = begin_event(t);
  for (const Section& s : ts.sections) {
    auto it = release_clocks_.find(key(s.lock, x));
    if (it != release_clocks_.end()) join_foreign(ts.p, it->second.writes, t);
  }
  if (!ts.sections.empty()) record_access(ts.sections.back().reads, x);
  return capture(t);
}

const VectorTime& WcpEngine::write(ThreadId t, VarId x) {
  ThreadState& ts = begin_event(t);
  for (const Section& s : ts.sections) {
    auto it = release_clocks_.find(key(s.lock, x));
    if (it == release_clocks_.end()) continue;
    join_foreign(ts.p, it->second.reads, t);
    join_foreign(ts.p, it->second.writes, t);
  }
  if (!ts.sections.empty()) record_access(ts.sections.back().writes, x);
  return capture(t);
}

const VectorTime& WcpEngine::fork(ThreadId t, ThreadId child) {
  if (child == t) throw EngineError("thread " + std::to_string(t) + " forks itself");
  if (child < threads_.size() && threads_[child].active) {
    throw EngineError("fork of already active thread " + std::to_string(child));
  }
  touch_thread(child);
  ThreadState& ts = begin_event(t);
  ThreadState& cs = threads_[child];
  cs.h = ts.h;
  cs.h.set(child, cs.local);
  cs.p = ts.p;
  // The fork's time is handed to the child, so later events of t must not
  // share it.
  ts.pending_increment = true;
  return capture(t);
}

const VectorTime& WcpEngine::join(ThreadId t, ThreadId child) {
  if (child == t) throw EngineError("thread " + std::to_string(t) + " joins itself");
  const bool known = child < threads_.size() && threads_[child].active;
  ThreadState& ts = begin_event(t);
  if (!known) {
    warnings_.push_back("join of unknown thread " + std::to_string(child) + " ignored");
    return capture(t);
  }
  const ThreadState& cs = threads_[child];
  ts.h.join_with(cs.h);
  ts.p.join_with(cs.p);
  return capture(t);
}

void WcpEngine::finish_thread(ThreadId t) {
  ThreadState& ts = threads_[t];
  if (ts.finished) return;
  ts.finished = true;
  metrics_.queue_load -= pending_[t];
  pending_[t] = 0;
  for (LockState& ls : locks_) {
    if (ls.cursor.size() <= t) ls.cursor.resize(t + 1, 0);
    ls.cursor[t] = ls.base + ls.history.size();
    collect(ls);
  }
}

const VectorTime& WcpEngine::process(const Event& e) {
  const VectorTime* c = nullptr;
  switch (e.kind) {
    case EventKind::Acquire: c = &acquire(e.tid, e.operand); break;
    case EventKind::Release: c = &release(e.tid, e.operand); break;
    case EventKind::Read: c = &read(e.tid, e.operand); break;
    case EventKind::Write: c = &write(e.tid, e.operand); break;
    case EventKind::Fork: c = &fork(e.tid, e.operand); break;
    case EventKind::Join: c = &join(e.tid, e.operand); break;
  }
  ++metrics_.events;
  const auto& last = options_.last_event_of_thread;
  if (e.tid < last.size() && last[e.tid] == e.idx) finish_thread(e.tid);
  return *c;
}

std::size_t WcpEngine::history_size(LockId lock) const {
  return lock < locks_.size() ? locks_[lock].history.size() : 0;
}

std::size_t WcpEngine::cursor(LockId lock, ThreadId t) const {
  if (lock >= locks_.size()) return 0;
  const LockState& ls = locks_[lock];
  return t < ls.cursor.size() ? ls.cursor[t] - ls.base : 0;
}

}  // namespace wcp
