#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string_view>
#include <utility>
#include <vector>

#include "wcp/trace.hpp"

namespace wcp::oracle {

/// Brute-force fixpoints of the happens-before, causally-precedes and
/// weak-causally-precedes relations, straight from their rule-based
/// definitions. Cubic in the trace length; meant for small traces and
/// differential testing of the streaming engines.

enum class RelationKind : std::uint8_t { HB, CPprec, WCPprec, CPle, WCPle };

std::string_view relation_name(RelationKind kind);

class BoundExceeded : public std::length_error {
 public:
  using std::length_error::length_error;
};

inline constexpr std::size_t kDefaultBound = 2000;

/// Dense n x n boolean relation over event indices.
class OrderRelation {
 public:
  OrderRelation(std::size_t n, RelationKind kind);

  std::size_t size() const { return n_; }
  RelationKind kind() const { return kind_; }

  bool test(std::size_t i, std::size_t j) const {
    return (bits_[i * words_ + j / 64] >> (j % 64)) & 1u;
  }
  /// Returns true if the bit was newly set.
  bool set(std::size_t i, std::size_t j) {
    auto& w = bits_[i * words_ + j / 64];
    const std::uint64_t mask = std::uint64_t{1} << (j % 64);
    if (w & mask) return false;
    w |= mask;
    return true;
  }
  /// Row i |= row j of `other`; true if anything changed.
  bool or_row(std::size_t i, const OrderRelation& other, std::size_t j);
  bool row_intersects(std::size_t i, const std::vector<std::uint64_t>& mask) const;

  bool ordered(std::size_t i, std::size_t j) const { return test(i, j) || test(j, i); }
  std::size_t count() const;
  std::vector<std::pair<std::size_t, std::size_t>> pairs() const;

  bool operator==(const OrderRelation& other) const { return n_ == other.n_ && bits_ == other.bits_; }
  /// Every pair of this relation is in `other`.
  bool subset_of(const OrderRelation& other) const;

  std::size_t words() const { return words_; }

 private:
  std::size_t n_;
  std::size_t words_;
  RelationKind kind_;
  std::vector<std::uint64_t> bits_;
};

/// Reflexive-transitive closure of thread order, release-to-later-acquire
/// edges on the same lock, and fork/join edges.
OrderRelation hb_closure(const Trace& trace, std::size_t bound = kDefaultBound);

/// Least relation closed under the WCP rules: (a) a release before a later
/// access inside a section of the same lock that conflicts with its section,
/// (b) a release before a later release of the same lock when their sections
/// hold ordered events, (c) composition with happens-before on both sides.
OrderRelation wcp_prec_closure(const Trace& trace, const OrderRelation& hb);
OrderRelation wcp_prec_closure(const Trace& trace, std::size_t bound = kDefaultBound);

/// Same for CP, whose rules (a) and (b) order the release before the later
/// acquire of the whole section.
OrderRelation cp_prec_closure(const Trace& trace, const OrderRelation& hb);
OrderRelation cp_prec_closure(const Trace& trace, std::size_t bound = kDefaultBound);

/// prec union thread order (reflexive).
OrderRelation with_thread_order(const Trace& trace, const OrderRelation& prec);

/// Conflicting pairs (i < j) unordered by `rel`.
std::vector<std::pair<EventIdx, EventIdx>> races_of(const Trace& trace, const OrderRelation& rel);

/// Cross-thread pairs produced directly by WCP rules (a) and (b) that do not
/// follow from another such pair composed with happens-before on either side:
/// the edges one would draw between threads to explain the relation.
std::vector<std::pair<EventIdx, EventIdx>> wcp_generating_edges(const Trace& trace,
                                                                const OrderRelation& hb,
                                                                const OrderRelation& wcp_prec);

struct Relations {
  OrderRelation hb;
  OrderRelation cp_prec;
  OrderRelation wcp_prec;
  OrderRelation cp_le;
  OrderRelation wcp_le;
};

Relations compute_all(const Trace& trace, std::size_t bound = kDefaultBound);

/// `PREC|<kind>|<i>|<j>` for every pair (i != j) of `rel`.
void dump(std::ostream& out, const OrderRelation& rel);

}  // namespace wcp::oracle
