#pragma once

#include <string>
#include <vector>

#include "wcp/trace.hpp"
#include "wcp/vector_time.hpp"
#include "wcp/wcp_engine.hpp"

namespace wcp {

/// Classic vector-clock happens-before timestamping.
///
/// Acquire joins the last release clock of the lock; release publishes the
/// thread clock. The local component advances before the first event after a
/// release or fork, the same policy as WcpEngine, so dumps line up.
class HbEngine {
 public:
  const VectorTime& process(const Event& e);

  const VectorTime& time(ThreadId t) const { return threads_.at(t).clock; }
  std::size_t num_threads() const { return threads_.size(); }
  std::uint64_t events() const { return events_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

 private:
  struct ThreadState {
    bool active = false;
    bool pending_increment = false;
    VectorTime clock;
  };

  ThreadState& touch(ThreadId t);
  ThreadState& begin_event(ThreadId t);

  std::vector<ThreadState> threads_;
  std::vector<VectorTime> lock_clocks_;
  std::vector<bool> held_;
  std::uint64_t events_ = 0;
  std::vector<std::string> warnings_;
};

}  // namespace wcp
