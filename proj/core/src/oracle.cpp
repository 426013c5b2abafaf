#include "wcp/oracle.hpp"

#include <algorithm>
#include <bit>
#include <string>
#include <ostream>

namespace wcp::oracle {

namespace {

void check_bound(const Trace& trace, std::size_t bound) {
  if (trace.events.size() > bound) {
    throw BoundExceeded("trace has " + std::to_string(trace.events.size()) +
                        " events; oracle bound is " + std::to_string(bound));
  }
}

using Mask = std::vector<std::uint64_t>;

Mask make_mask(std::size_t n) { return Mask((n + 63) / 64, 0); }
void mask_set(Mask& m, std::size_t i) { m[i / 64] |= std::uint64_t{1} << (i % 64); }

template <typename Fn>
void for_each_bit(const OrderRelation& rel, std::size_t row, const std::uint64_t* words, Fn&& fn) {
  for (std::size_t w = 0; w < rel.words(); ++w) {
    std::uint64_t bits = words[w];
    while (bits) {
      const int b = std::countr_zero(bits);
      fn(w * 64 + static_cast<std::size_t>(b));
      bits &= bits - 1;
    }
  }
  (void)row;
}

struct SectionMasks {
  SectionMap map;
  std::vector<Mask> of_event;  // critical section of each lock event; empty otherwise
};

SectionMasks section_masks(const Trace& trace) {
  SectionMasks out{compute_sections(trace), {}};
  const auto n = trace.events.size();
  out.of_event.resize(n);
  for (const Event& e : trace.events) {
    if (!e.is_lock_op()) continue;
    // A release without an acquire has no section.
    if (e.kind == EventKind::Release && out.map.match[e.idx] == SectionMap::kNoEvent) continue;
    Mask m = make_mask(n);
    const auto [first, last] = out.map.span(trace, e.idx);
    for (EventIdx i = first; i <= last; ++i) {
      if (trace.events[i].tid == e.tid) mask_set(m, i);
    }
    out.of_event[e.idx] = std::move(m);
  }
  return out;
}

bool masks_conflict(const Trace& trace, const Mask& a, const Mask& b) {
  for (std::size_t wa = 0; wa < a.size(); ++wa) {
    for (std::uint64_t x = a[wa]; x; x &= x - 1) {
      const Event& e1 = trace.events[wa * 64 + std::countr_zero(x)];
      if (!e1.is_access()) continue;
      for (std::size_t wb = 0; wb < b.size(); ++wb) {
        for (std::uint64_t y = b[wb]; y; y &= y - 1) {
          if (conflicting(e1, trace.events[wb * 64 + std::countr_zero(y)])) return true;
        }
      }
    }
  }
  return false;
}

bool contains_conflict_with(const Trace& trace, const Mask& section, const Event& e) {
  for (std::size_t w = 0; w < section.size(); ++w) {
    for (std::uint64_t x = section[w]; x; x &= x - 1) {
      if (conflicting(trace.events[w * 64 + std::countr_zero(x)], e)) return true;
    }
  }
  return false;
}

/// Some event of `from` is related by `rel` to some event of `to`.
bool sections_related(const OrderRelation& rel, const Mask& from, const Mask& to) {
  for (std::size_t w = 0; w < from.size(); ++w) {
    for (std::uint64_t x = from[w]; x; x &= x - 1) {
      if (rel.row_intersects(w * 64 + std::countr_zero(x), to)) return true;
    }
  }
  return false;
}

/// rel := hb ; rel ; hb. Returns true on change.
bool compose_with_hb(OrderRelation& rel, const OrderRelation& hb) {
  const std::size_t n = rel.size();
  OrderRelation right(n, rel.kind());
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      if (rel.test(a, b)) right.or_row(a, hb, b);
    }
  }
  OrderRelation both(n, rel.kind());
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t a = 0; a < n; ++a) {
      if (hb.test(x, a)) both.or_row(x, right, a);
    }
  }
  const bool changed = !(both == rel);
  rel = std::move(both);
  return changed;
}

std::vector<EventIdx> releases(const Trace& trace, const SectionMasks& sm) {
  std::vector<EventIdx> out;
  for (const Event& e : trace.events) {
    if (e.kind == EventKind::Release && !sm.of_event[e.idx].empty()) out.push_back(e.idx);
  }
  return out;
}

}  // namespace

std::string_view relation_name(RelationKind kind) {
  switch (kind) {
    case RelationKind::HB: return "HB";
    case RelationKind::CPprec: return "CPprec";
    case RelationKind::WCPprec: return "WCPprec";
    case RelationKind::CPle: return "CPle";
    case RelationKind::WCPle: return "WCPle";
  }
  return "?";
}

OrderRelation::OrderRelation(std::size_t n, RelationKind kind)
    : n_(n), words_((n + 63) / 64), kind_(kind), bits_(n * words_, 0) {}

bool OrderRelation::or_row(std::size_t i, const OrderRelation& other, std::size_t j) {
  bool changed = false;
  std::uint64_t* dst = &bits_[i * words_];
  const std::uint64_t* src = &other.bits_[j * words_];
  for (std::size_t w = 0; w < words_; ++w) {
    const std::uint64_t merged = dst[w] | src[w];
    changed |= merged != dst[w];
    dst[w] = merged;
  }
  return changed;
}

bool OrderRelation::row_intersects(std::size_t i, const std::vector<std::uint64_t>& mask) const {
  const std::uint64_t* row = &bits_[i * words_];
  for (std::size_t w = 0; w < words_; ++w) {
    if (row[w] & mask[w]) return true;
  }
  return false;
}

std::size_t OrderRelation::count() const {
  std::size_t total = 0;
  for (std::uint64_t w : bits_) total += static_cast<std::size_t>(std::popcount(w));
  return total;
}

std::vector<std::pair<std::size_t, std::size_t>> OrderRelation::pairs() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < n_; ++i) {
    for_each_bit(*this, i, &bits_[i * words_], [&](std::size_t j) { out.emplace_back(i, j); });
  }
  return out;
}

bool OrderRelation::subset_of(const OrderRelation& other) const {
  if (n_ != other.n_) return false;
  for (std::size_t w = 0; w < bits_.size(); ++w) {
    if (bits_[w] & ~other.bits_[w]) return false;
  }
  return true;
}

OrderRelation hb_closure(const Trace& trace, std::size_t bound) {
  check_bound(trace, bound);
  const std::size_t n = trace.events.size();
  std::vector<std::vector<EventIdx>> out(n);

  std::vector<EventIdx> last(trace.num_threads(), SectionMap::kNoEvent);
  std::vector<EventIdx> pending_fork(trace.num_threads(), SectionMap::kNoEvent);
  std::vector<std::vector<EventIdx>> releases_of(trace.num_locks());
  for (const Event& e : trace.events) {
    if (last[e.tid] != SectionMap::kNoEvent) {
      out[last[e.tid]].push_back(e.idx);
    } else if (pending_fork[e.tid] != SectionMap::kNoEvent) {
      out[pending_fork[e.tid]].push_back(e.idx);
    }
    switch (e.kind) {
      case EventKind::Acquire:
        for (EventIdx r : releases_of[e.operand]) out[r].push_back(e.idx);
        break;
      case EventKind::Release: releases_of[e.operand].push_back(e.idx); break;
      case EventKind::Fork:
        if (last[e.operand] == SectionMap::kNoEvent) pending_fork[e.operand] = e.idx;
        break;
      case EventKind::Join:
        if (e.operand != e.tid && last[e.operand] != SectionMap::kNoEvent) {
          out[last[e.operand]].push_back(e.idx);
        }
        break;
      default: break;
    }
    last[e.tid] = e.idx;
  }

  OrderRelation hb(n, RelationKind::HB);
  for (std::size_t i = n; i-- > 0;) {
    hb.set(i, i);
    for (EventIdx j : out[i]) hb.or_row(i, hb, j);
  }
  return hb;
}

OrderRelation wcp_prec_closure(const Trace& trace, const OrderRelation& hb) {
  const std::size_t n = trace.events.size();
  const SectionMasks sm = section_masks(trace);
  const auto rels = releases(trace, sm);
  OrderRelation prec(n, RelationKind::WCPprec);

  // Rule (a).
  for (EventIdx r : rels) {
    const Event& rel = trace.events[r];
    for (EventIdx e = r + 1; e < n; ++e) {
      const Event& ev = trace.events[e];
      if (!ev.is_access()) continue;
      const auto& locks = sm.map.enclosing[e];
      if (std::find(locks.begin(), locks.end(), rel.operand) == locks.end()) continue;
      if (contains_conflict_with(trace, sm.of_event[r], ev)) prec.set(r, e);
    }
  }

  bool changed = true;
  while (changed) {
    changed = compose_with_hb(prec, hb);
    // Rule (b).
    for (std::size_t a = 0; a < rels.size(); ++a) {
      for (std::size_t b = a + 1; b < rels.size(); ++b) {
        const EventIdx r1 = rels[a];
        const EventIdx r2 = rels[b];
        if (trace.events[r1].operand != trace.events[r2].operand || prec.test(r1, r2)) continue;
        if (sections_related(prec, sm.of_event[r1], sm.of_event[r2])) {
          prec.set(r1, r2);
          changed = true;
        }
      }
    }
  }
  return prec;
}

OrderRelation wcp_prec_closure(const Trace& trace, std::size_t bound) {
  return wcp_prec_closure(trace, hb_closure(trace, bound));
}

OrderRelation cp_prec_closure(const Trace& trace, const OrderRelation& hb) {
  const std::size_t n = trace.events.size();
  const SectionMasks sm = section_masks(trace);
  const auto rels = releases(trace, sm);
  std::vector<EventIdx> acqs;
  for (const Event& e : trace.events) {
    if (e.kind == EventKind::Acquire) acqs.push_back(e.idx);
  }
  OrderRelation prec(n, RelationKind::CPprec);

  // Rule (a).
  for (EventIdx r : rels) {
    for (EventIdx a : acqs) {
      if (a <= r || trace.events[a].operand != trace.events[r].operand) continue;
      if (masks_conflict(trace, sm.of_event[r], sm.of_event[a])) prec.set(r, a);
    }
  }

  bool changed = true;
  while (changed) {
    changed = compose_with_hb(prec, hb);
    // Rule (b).
    for (EventIdx r : rels) {
      for (EventIdx a : acqs) {
        if (a <= r || trace.events[a].operand != trace.events[r].operand || prec.test(r, a)) {
          continue;
        }
        if (sections_related(prec, sm.of_event[r], sm.of_event[a])) {
          prec.set(r, a);
          changed = true;
        }
      }
    }
  }
  return prec;
}

OrderRelation cp_prec_closure(const Trace& trace, std::size_t bound) {
  return cp_prec_closure(trace, hb_closure(trace, bound));
}

OrderRelation with_thread_order(const Trace& trace, const OrderRelation& prec) {
  const RelationKind kind =
      prec.kind() == RelationKind::CPprec ? RelationKind::CPle : RelationKind::WCPle;
  OrderRelation le(prec.size(), kind);
  for (std::size_t i = 0; i < prec.size(); ++i) le.or_row(i, prec, i);
  for (std::size_t i = 0; i < prec.size(); ++i) {
    for (std::size_t j = i; j < prec.size(); ++j) {
      if (trace.events[i].tid == trace.events[j].tid) le.set(i, j);
    }
  }
  return le;
}

std::vector<std::pair<EventIdx, EventIdx>> races_of(const Trace& trace, const OrderRelation& rel) {
  std::vector<std::pair<EventIdx, EventIdx>> out;
  const std::size_t n = trace.events.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (!trace.events[i].is_access()) continue;
    for (std::size_t j = i + 1; j < n; ++j) {
      if (conflicting(trace.events[i], trace.events[j]) && !rel.ordered(i, j)) {
        out.emplace_back(static_cast<EventIdx>(i), static_cast<EventIdx>(j));
      }
    }
  }
  return out;
}

std::vector<std::pair<EventIdx, EventIdx>> wcp_generating_edges(const Trace& trace,
                                                                const OrderRelation& hb,
                                                                const OrderRelation& wcp_prec) {
  const std::size_t n = trace.events.size();
  const SectionMasks sm = section_masks(trace);
  const auto rels = releases(trace, sm);

  std::vector<std::pair<EventIdx, EventIdx>> direct;
  for (EventIdx r : rels) {
    const Event& rel = trace.events[r];
    for (EventIdx e = r + 1; e < n; ++e) {
      const Event& ev = trace.events[e];
      if (ev.tid == rel.tid) continue;
      bool generated = false;
      if (ev.is_access()) {
        const auto& locks = sm.map.enclosing[e];
        generated = std::find(locks.begin(), locks.end(), rel.operand) != locks.end() &&
                    contains_conflict_with(trace, sm.of_event[r], ev);
      } else if (ev.kind == EventKind::Release && ev.operand == rel.operand &&
                 !sm.of_event[e].empty()) {
        generated = sections_related(wcp_prec, sm.of_event[r], sm.of_event[e]);
      }
      if (generated) direct.emplace_back(r, e);
    }
  }

  std::vector<std::pair<EventIdx, EventIdx>> out;
  for (const auto& edge : direct) {
    bool implied = false;
    for (const auto& other : direct) {
      if (other == edge) continue;
      if (hb.test(edge.first, other.first) && hb.test(other.second, edge.second)) {
        implied = true;
        break;
      }
    }
    if (!implied) out.push_back(edge);
  }
  return out;
}

Relations compute_all(const Trace& trace, std::size_t bound) {
  OrderRelation hb = hb_closure(trace, bound);
  OrderRelation cp = cp_prec_closure(trace, hb);
  OrderRelation wcp = wcp_prec_closure(trace, hb);
  OrderRelation cp_le = with_thread_order(trace, cp);
  OrderRelation wcp_le = with_thread_order(trace, wcp);
  return {std::move(hb), std::move(cp), std::move(wcp), std::move(cp_le), std::move(wcp_le)};
}

void dump(std::ostream& out, const OrderRelation& rel) {
  for (const auto& [i, j] : rel.pairs()) {
    if (i != j) out << "PREC|" << relation_name(rel.kind()) << '|' << i << '|' << j << '\n';
  }
}

}  // namespace wcp::oracle
