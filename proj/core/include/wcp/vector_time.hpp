#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

namespace wcp {

using Tick = std::uint32_t;
using ThreadId = std::uint32_t;

/// A map from dense thread index to a non-negative counter.
///
/// Components past the stored width read as 0, so the value grows on demand as
/// new threads show up in a stream. Equality ignores trailing zeros: `[1]`,
/// `[1,0]` and `[1,0,0]` are the same time.
class VectorTime {
 public:
  VectorTime() = default;
  VectorTime(std::initializer_list<Tick> components) : c_(components) {}

  Tick get(ThreadId t) const { return t < c_.size() ? c_[t] : 0; }
  Tick operator[](ThreadId t) const { return get(t); }

  void set(ThreadId t, Tick n) {
    if (t >= c_.size()) {
      if (n == 0) return;
      c_.resize(t + 1, 0);
    }
    c_[t] = n;
  }

  /// Pointwise max, in place.
  void join_with(const VectorTime& other) {
    const auto& o = other.c_;
    if (o.size() > c_.size()) c_.resize(o.size(), 0);
    for (std::size_t i = 0; i < o.size(); ++i) c_[i] = std::max(c_[i], o[i]);
  }

  std::size_t width() const { return c_.size(); }
  bool is_bottom() const {
    return std::all_of(c_.begin(), c_.end(), [](Tick v) { return v == 0; });
  }
  const std::vector<Tick>& components() const { return c_; }

  /// Drops trailing zero components.
  void canonicalize() {
    while (!c_.empty() && c_.back() == 0) c_.pop_back();
  }

  /// Renders `[n0,n1,...]`, zero-padded to at least `min_width` components.
  std::string to_string(std::size_t min_width = 0) const;

  friend bool leq(const VectorTime& a, const VectorTime& b);
  friend bool operator==(const VectorTime& a, const VectorTime& b);

 private:
  std::vector<Tick> c_;
};

/// Pointwise comparison over the union of widths.
bool leq(const VectorTime& a, const VectorTime& b);

/// `leq(a, b[t := n])` without materializing the override.
bool leq_with_override(const VectorTime& a, const VectorTime& b, ThreadId t, Tick n);

VectorTime join(const VectorTime& a, const VectorTime& b);
VectorTime with_component(VectorTime v, ThreadId t, Tick n);

inline bool concurrent(const VectorTime& a, const VectorTime& b) {
  return !leq(a, b) && !leq(b, a);
}

}  // namespace wcp
