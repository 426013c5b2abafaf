#pragma once

#include <cstddef>

#include "wcp/trace.hpp"
#include "wcp/tracegen.hpp"

namespace wcp::testing {

/// Parameters of the i-th trace of the differential corpus: at most 50
/// events, 4 threads, 3 locks and 4 variables, no fork/join.
gen::GenParams corpus_params(std::size_t i);

inline Trace corpus_trace(std::size_t i) { return gen::gen_random(corpus_params(i)); }

inline constexpr std::size_t kCorpusSize = 1200;

}  // namespace wcp::testing
