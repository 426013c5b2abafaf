#include "wcp/hb_engine.hpp"

namespace wcp {

HbEngine::ThreadState& HbEngine::touch(ThreadId t) {
  if (t >= threads_.size()) threads_.resize(t + 1);
  ThreadState& ts = threads_[t];
  if (!ts.active) {
    ts.active = true;
    ts.clock.set(t, 1);
  }
  return ts;
}

HbEngine::ThreadState& HbEngine::begin_event(ThreadId t) {
  ThreadState& ts = touch(t);
  if (ts.pending_increment) {
    ts.pending_increment = false;
    ts.clock.set(t, ts.clock.get(t) + 1);
  }
  return ts;
}

const VectorTime& HbEngine::process(const Event& e) {
  ++events_;
  const ThreadId t = e.tid;
  switch (e.kind) {
    case EventKind::Acquire: {
      ThreadState& ts = begin_event(t);
      if (e.operand >= lock_clocks_.size()) {
        lock_clocks_.resize(e.operand + 1);
        held_.resize(e.operand + 1, false);
      }
      if (held_[e.operand]) {
        throw EngineError("acquire of held lock " + std::to_string(e.operand));
      }
      held_[e.operand] = true;
      ts.clock.join_with(lock_clocks_[e.operand]);
      return ts.clock;
    }
    case EventKind::Release: {
      ThreadState& ts = begin_event(t);
      if (e.operand >= held_.size() || !held_[e.operand]) {
        throw EngineError("release of lock " + std::to_string(e.operand) + " that is not held");
      }
      held_[e.operand] = false;
      lock_clocks_[e.operand] = ts.clock;
      ts.pending_increment = true;
      return ts.clock;
    }
    case EventKind::Read:
    case EventKind::Write: return begin_event(t).clock;
    case EventKind::Fork: {
      if (e.operand == t) throw EngineError("thread forks itself");
      if (e.operand < threads_.size() && threads_[e.operand].active) {
        throw EngineError("fork of already active thread " + std::to_string(e.operand));
      }
      touch(e.operand);
      ThreadState& ts = begin_event(t);
      ThreadState& child = threads_[e.operand];
      child.clock = ts.clock;
      child.clock.set(e.operand, 1);
      ts.pending_increment = true;
      return ts.clock;
    }
    case EventKind::Join: {
      if (e.operand == t) throw EngineError("thread joins itself");
      const bool known = e.operand < threads_.size() && threads_[e.operand].active;
      ThreadState& ts = begin_event(t);
      if (!known) {
        warnings_.push_back("join of unknown thread " + std::to_string(e.operand) + " ignored");
        return ts.clock;
      }
      ts.clock.join_with(threads_[e.operand].clock);
      return ts.clock;
    }
  }
  return threads_[t].clock;
}

}  // namespace wcp
