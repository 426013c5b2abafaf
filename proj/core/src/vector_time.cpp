#include "wcp/vector_time.hpp"

namespace wcp {

bool leq(const VectorTime& a, const VectorTime& b) {
  const auto& x = a.c_;
  const auto& y = b.c_;
  const std::size_t common = std::min(x.size(), y.size());
  for (std::size_t i = 0; i < common; ++i) {
    if (x[i] > y[i]) return false;
  }
  for (std::size_t i = common; i < x.size(); ++i) {
    if (x[i] != 0) return false;
  }
  return true;
}

bool leq_with_override(const VectorTime& a, const VectorTime& b, ThreadId t, Tick n) {
  const auto& x = a.components();
  const auto& y = b.components();
  for (std::size_t i = 0; i < x.size(); ++i) {
    const Tick rhs = i == t ? n : (i < y.size() ? y[i] : 0);
    if (x[i] > rhs) return false;
  }
  return true;
}

bool operator==(const VectorTime& a, const VectorTime& b) {
  return leq(a, b) && leq(b, a);
}

VectorTime join(const VectorTime& a, const VectorTime& b) {
  VectorTime out = a;
  out.join_with(b);
  return out;
}

VectorTime with_component(VectorTime v, ThreadId t, Tick n) {
  v.set(t, n);
  return v;
}

std::string VectorTime::to_string(std::size_t min_width) const {
  std::string out = "[";
  const std::size_t n = std::max(min_width, c_.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (i) out += ',';
    out += std::to_string(get(static_cast<ThreadId>(i)));
  }
  out += ']';
  return out;
}

}  // namespace wcp
