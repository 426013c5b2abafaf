#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "wcp/oracle.hpp"
#include "wcp/tracegen.hpp"

namespace wcp::cli {

enum class Command : std::uint8_t { Analyze, Validate, Generate, Oracle };
enum class DetectorChoice : std::uint8_t { Wcp, Hb, Both };

struct RunConfig {
  Command command = Command::Analyze;
  DetectorChoice detector = DetectorChoice::Wcp;
  std::string input = "-";  // "-" reads stdin
  std::string output = "-";  // generate only
  bool pairs = true;
  bool dump_timestamps = false;
  std::size_t pair_budget = 10'000'000;
  bool gc_history = false;
  std::string metrics_out;
  std::string format = "std";

  // generate
  std::string fixture;
  std::string bits;  // "u,v"
  bool gen_random = false;
  gen::GenParams gen;
  std::uint64_t scaling_events = 0;

  // oracle
  std::size_t bound = oracle::kDefaultBound;
};

/// Exit status: 0 no races (or valid), 1 races found (or invalid), 2 error.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Parses argv and runs. Usage errors exit with 2.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace wcp::cli
