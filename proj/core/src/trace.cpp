#include "wcp/trace.hpp"

#include <algorithm>

namespace wcp {

std::string_view kind_token(EventKind kind) {
  switch (kind) {
    case EventKind::Acquire: return "acq";
    case EventKind::Release: return "rel";
    case EventKind::Read: return "r";
    case EventKind::Write: return "w";
    case EventKind::Fork: return "fork";
    case EventKind::Join: return "join";
  }
  return "?";
}

std::uint32_t SymbolTable::intern(std::string_view name) {
  auto it = index_.find(std::string(name));
  if (it != index_.end()) return it->second;
  const auto id = static_cast<std::uint32_t>(names_.size());
  names_.emplace_back(name);
  index_.emplace(names_.back(), id);
  return id;
}

std::uint32_t SymbolTable::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  return it == index_.end() ? npos : it->second;
}

std::string Symbols::location(const Event& e) const {
  if (e.loc == kNoLoc) return "idx:" + std::to_string(e.idx);
  return locs.name(e.loc);
}

const std::string& Symbols::operand_name(const Event& e) const {
  switch (e.kind) {
    case EventKind::Acquire:
    case EventKind::Release: return locks.name(e.operand);
    case EventKind::Read:
    case EventKind::Write: return vars.name(e.operand);
    case EventKind::Fork:
    case EventKind::Join: break;
  }
  return threads.name(e.operand);
}

bool conflicting(const Event& a, const Event& b) {
  return a.is_access() && b.is_access() && a.operand == b.operand && a.tid != b.tid &&
         (a.kind == EventKind::Write || b.kind == EventKind::Write);
}

Event& Trace::add(std::string_view tid, EventKind kind, std::string_view operand,
                  std::string_view loc) {
  Event e;
  e.idx = static_cast<EventIdx>(events.size());
  e.tid = symbols.threads.intern(tid);
  e.kind = kind;
  switch (kind) {
    case EventKind::Acquire:
    case EventKind::Release: e.operand = symbols.locks.intern(operand); break;
    case EventKind::Read:
    case EventKind::Write: e.operand = symbols.vars.intern(operand); break;
    case EventKind::Fork:
    case EventKind::Join: e.operand = symbols.threads.intern(operand); break;
  }
  e.loc = loc.empty() ? kNoLoc : symbols.locs.intern(loc);
  events.push_back(e);
  return events.back();
}

std::pair<EventIdx, EventIdx> SectionMap::span(const Trace& trace, EventIdx e) const {
  const Event& ev = trace.events[e];
  const EventIdx other = match[e];
  if (ev.kind == EventKind::Release) return {other == kNoEvent ? e : other, e};
  if (other == kNoEvent) return {e, last_of_thread[ev.tid]};
  return {e, other};
}

SectionMap compute_sections(const Trace& trace) {
  SectionMap map;
  const auto n = trace.events.size();
  map.match.assign(n, SectionMap::kNoEvent);
  map.enclosing.resize(n);
  map.last_of_thread.assign(trace.num_threads(), 0);

  // Per thread: stack of (lock, acquire idx).
  std::vector<std::vector<std::pair<LockId, EventIdx>>> open(trace.num_threads());
  for (const Event& e : trace.events) {
    auto& stack = open[e.tid];
    map.last_of_thread[e.tid] = e.idx;
    for (const auto& [lock, acq] : stack) map.enclosing[e.idx].push_back(lock);
    if (e.kind == EventKind::Acquire) {
      stack.emplace_back(e.operand, e.idx);
    } else if (e.kind == EventKind::Release) {
      // Match the innermost open acquire of this lock.
      auto it = std::find_if(stack.rbegin(), stack.rend(),
                             [&](const auto& f) { return f.first == e.operand; });
      if (it != stack.rend()) {
        map.match[e.idx] = it->second;
        map.match[it->second] = e.idx;
        stack.erase(std::next(it).base());
        auto& enc = map.enclosing[e.idx];
        enc.erase(std::find(enc.begin(), enc.end(), e.operand));
      }
    }
  }
  return map;
}

}  // namespace wcp
