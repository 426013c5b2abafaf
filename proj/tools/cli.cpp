#include "cli.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "wcp/hb_engine.hpp"
#include "wcp/race_reporter.hpp"
#include "wcp/trace_io.hpp"
#include "wcp/validate.hpp"
#include "wcp/wcp_engine.hpp"

namespace wcp::cli {

namespace {

constexpr int kExitClean = 0;
constexpr int kExitFound = 1;
constexpr int kExitError = 2;

class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Input {
  std::unique_ptr<std::ifstream> file;
  std::istream* stream = nullptr;
};

Input open_input(const std::string& path) {
  Input in;
  if (path == "-") {
    in.stream = &std::cin;
    return in;
  }
  in.file = std::make_unique<std::ifstream>(path, std::ios::binary);
  if (!*in.file) throw InputError("cannot open '" + path + "'");
  in.stream = in.file.get();
  return in;
}

std::string format_pct(std::uint64_t part, std::uint64_t whole) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", whole == 0 ? 0.0 : 100.0 * double(part) / double(whole));
  return buf;
}

std::string format_seconds(double seconds) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", seconds);
  return buf;
}

std::string format_flag(const Flag& f, Detector d, const Symbols& symbols) {
  Event e;
  e.idx = f.idx;
  e.loc = f.loc;
  std::string out = "FLAG|";
  out += detector_name(d);
  out += '|' + std::to_string(f.idx) + '|' + symbols.threads.name(f.tid) + '|';
  out += kind_token(f.kind);
  out += '|' + symbols.vars.name(f.var) + '|' + symbols.location(e);
  return out;
}

/// Reports a trace that fails validation and returns the exit status.
int report_invalid(const std::vector<Violation>& violations, std::ostream& err) {
  for (const Violation& v : violations) {
    if (!is_error(v.kind)) continue;
    err << "error: event " << v.idx << ": " << violation_name(v.kind) << ": " << v.message << '\n';
  }
  err << "error: trace is not well-formed; run `validate` for the full report\n";
  return kExitError;
}

void report_warnings(const std::vector<Violation>& violations, std::ostream& err) {
  for (const Violation& v : violations) {
    if (is_error(v.kind)) continue;
    err << "warning: event " << v.idx << ": " << violation_name(v.kind) << ": " << v.message << '\n';
  }
}

/// One pass of the selected detectors over the logical trace.
class Analysis {
 public:
  Analysis(const RunConfig& config, WcpEngineOptions options, std::ostream& out)
      : config_(config),
        use_wcp_(config.detector != DetectorChoice::Hb),
        use_hb_(config.detector != DetectorChoice::Wcp),
        wcp_(std::move(options)),
        out_(out) {}

  void feed(const Event& e, const Symbols& symbols) {
    ++events_;
    if (use_wcp_) {
      const VectorTime& c = wcp_.process(e);
      if (config_.dump_timestamps) {
        const std::size_t w = symbols.threads.size();  // threads seen so far
        out_ << e.idx << '|' << symbols.threads.name(e.tid) << "|C=" << c.to_string(w)
             << "|P=" << wcp_.predecessor_time(e.tid).to_string(w)
             << "|H=" << wcp_.hb_time(e.tid).to_string(w) << '\n';
      }
      if (e.is_access()) {
        if (auto f = wcp_clocks_.check_access(e, c)) wcp_flags_.push_back(*f);
      }
    }
    if (use_hb_) {
      const VectorTime& c = hb_.process(e);
      if (config_.dump_timestamps) {
        out_ << e.idx << '|' << symbols.threads.name(e.tid) << "|HB=" << c.to_string(symbols.threads.size())
             << '\n';
      }
      if (e.is_access()) {
        if (auto f = hb_clocks_.check_access(e, c)) hb_flags_.push_back(*f);
      }
    }
  }

  bool use_wcp() const { return use_wcp_; }
  bool use_hb() const { return use_hb_; }
  std::uint64_t events() const { return events_; }
  const WcpEngine& wcp() const { return wcp_; }
  const HbEngine& hb() const { return hb_; }
  const std::vector<Flag>& flags(Detector d) const {
    return d == Detector::Wcp ? wcp_flags_ : hb_flags_;
  }

 private:
  const RunConfig& config_;
  bool use_wcp_;
  bool use_hb_;
  WcpEngine wcp_;
  HbEngine hb_;
  AccessClocks wcp_clocks_;
  AccessClocks hb_clocks_;
  std::vector<Flag> wcp_flags_;
  std::vector<Flag> hb_flags_;
  std::uint64_t events_ = 0;
  std::ostream& out_;
};


int finish_analysis(const RunConfig& config, const Analysis& analysis, const Symbols& symbols,
                    const Trace* trace, double seconds, std::ostream& out, std::ostream& err) {
  std::vector<Detector> detectors;
  if (analysis.use_wcp()) detectors.push_back(Detector::Wcp);
  if (analysis.use_hb()) detectors.push_back(Detector::Hb);

  std::ostringstream body;
  std::ostringstream summary;
  bool found = false;
  std::vector<std::string> human;

  for (Detector d : detectors) {
    const auto& flags = analysis.flags(d);
    found = found || !flags.empty();
    summary << detector_name(d) << ".flags=" << flags.size() << '\n';
    if (trace != nullptr) {
      PairReport report = resolve_pairs(*trace, flags, d, config.pair_budget);
      for (const RacePair& p : report.pairs) body << format_race(p, d) << '\n';
      for (const Flag& f : report.degraded_flags) body << format_flag(f, d, symbols) << '\n';
      for (const std::string& w : report.warnings) err << "warning: " << w << '\n';
      summary << detector_name(d) << ".distinct_pairs=" << report.pairs.size() << '\n';
      human.push_back(std::string(detector_name(d)) + ": " + std::to_string(report.pairs.size()) +
                      " race pair(s)");
    } else {
      for (const Flag& f : flags) body << format_flag(f, d, symbols) << '\n';
      human.push_back(std::string(detector_name(d)) + ": " + std::to_string(flags.size()) +
                      " flagged access(es)");
    }
    if (d == Detector::Wcp) {
      const WcpMetrics& m = analysis.wcp().metrics();
      summary << "wcp.max_queue_load=" << m.max_queue_load << '\n';
      summary << "wcp.max_queue_load_pct=" << format_pct(m.max_queue_load, analysis.events())
              << '\n';
    }
  }

  out << "# wcprace report\n";
  out << "# detectors:";
  for (Detector d : detectors) out << ' ' << detector_name(d);
  out << '\n';
  if (analysis.use_wcp()) {
    out << "# a wcp race witnesses a predictable race or a predictable deadlock;"
           " only the first wcp pair is guaranteed (sound=1)\n";
  }
  out << body.str();
  out << "events=" << analysis.events() << '\n';
  out << "threads=" << symbols.threads.size() << '\n';
  out << "locks=" << symbols.locks.size() << '\n';
  out << "vars=" << symbols.vars.size() << '\n';
  out << summary.str();
  out << "# summary:";
  for (std::size_t i = 0; i < human.size(); ++i) out << (i ? "; " : " ") << human[i];
  out << '\n';

  for (const std::string& w : analysis.wcp().warnings()) err << "warning: " << w << '\n';
  for (const std::string& w : analysis.hb().warnings()) err << "warning: " << w << '\n';
  err << "wall_time_s=" << format_seconds(seconds) << '\n';

  if (!config.metrics_out.empty()) {
    std::ofstream m(config.metrics_out);
    if (!m) throw InputError("cannot write metrics file '" + config.metrics_out + "'");
    const WcpMetrics& wm = analysis.wcp().metrics();
    m << "events=" << analysis.events() << '\n';
    m << "threads=" << symbols.threads.size() << '\n';
    m << "locks=" << symbols.locks.size() << '\n';
    m << "vars=" << symbols.vars.size() << '\n';
    for (Detector d : detectors) m << detector_name(d) << ".flags=" << analysis.flags(d).size() << '\n';
    if (analysis.use_wcp()) {
      m << "wcp.max_queue_load=" << wm.max_queue_load << '\n';
      m << "wcp.max_queue_load_pct=" << format_pct(wm.max_queue_load, analysis.events()) << '\n';
      m << "wcp.max_retained_entries=" << wm.max_retained_entries << '\n';
    }
    m << "wall_time_s=" << format_seconds(seconds) << '\n';
  }
  return found ? kExitFound : kExitClean;
}

int run_analyze(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };
  Input in = open_input(config.input);

  if (config.pairs || config.gc_history) {
    Trace trace = read_trace(*in.stream);
    const ValidationReport report = validate(trace);
    if (!report.ok) return report_invalid(report.violations, err);
    report_warnings(report.violations, err);
    if (report.flattened > 0 || report.error_count() > 0) trace = flatten_reentrant(trace);

    WcpEngineOptions options;
    if (config.gc_history) {
      options.gc_history = true;
      options.thread_universe = trace.num_threads();
      options.last_event_of_thread.assign(trace.num_threads(), SectionMap::kNoEvent);
      for (const Event& e : trace.events) options.last_event_of_thread[e.tid] = e.idx;
    }
    Analysis analysis(config, std::move(options), out);
    for (const Event& e : trace.events) analysis.feed(e, trace.symbols);
    return finish_analysis(config, analysis, trace.symbols, config.pairs ? &trace : nullptr,
                           elapsed(), out, err);
  }

  Symbols symbols;
  TraceReader reader(*in.stream, symbols);
  Validator validator(symbols);
  Analysis analysis(config, {}, out);
  EventIdx logical = 0;
  while (auto e = reader.next()) {
    const bool keep = validator.observe(*e);
    if (validator.has_error()) return report_invalid(validator.violations(), err);
    if (!keep) continue;
    e->idx = logical++;
    analysis.feed(*e, symbols);
  }
  report_warnings(validator.finish().violations, err);
  return finish_analysis(config, analysis, symbols, nullptr, elapsed(), out, err);
}

int run_validate(const RunConfig& config, std::ostream& out) {
  Input in = open_input(config.input);
  Symbols symbols;
  TraceReader reader(*in.stream, symbols);
  Validator validator(symbols);
  std::uint64_t events = 0;
  while (auto e = reader.next()) {
    validator.observe(*e);
    ++events;
  }
  const ValidationReport report = validator.finish();
  out << "ok=" << (report.ok ? "true" : "false") << '\n';
  out << "events=" << events << '\n';
  out << "errors=" << report.error_count() << '\n';
  out << "warnings=" << report.warning_count() << '\n';
  out << "flattened=" << report.flattened << '\n';
  for (const Violation& v : report.violations) {
    out << "VIOLATION|" << v.idx << '|' << violation_name(v.kind) << '|' << v.message << '\n';
  }
  return report.ok ? kExitClean : kExitFound;
}

int run_generate(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const int sources = int(!config.fixture.empty()) + int(!config.bits.empty()) +
                      int(config.gen_random) + int(config.scaling_events > 0);
  if (sources != 1) {
    err << "error: generate needs exactly one of --fixture, --bits, --gen-random, --scaling\n";
    return kExitError;
  }

  std::unique_ptr<std::ofstream> file;
  std::ostream* sink = &out;
  if (config.output != "-") {
    file = std::make_unique<std::ofstream>(config.output, std::ios::binary);
    if (!*file) throw InputError("cannot write '" + config.output + "'");
    sink = file.get();
  }

  if (config.scaling_events > 0) {
    gen::ScalingWorkload workload(config.gen.threads, config.gen.locks, config.gen.seed);
    for (std::uint64_t i = 0; i < config.scaling_events; ++i) {
      *sink << format_event(workload.next(), workload.symbols()) << '\n';
    }
    return kExitClean;
  }

  Trace trace;
  if (!config.fixture.empty()) {
    trace = gen::fixture(config.fixture);
  } else if (!config.bits.empty()) {
    const auto comma = config.bits.find(',');
    if (comma == std::string::npos) {
      err << "error: --bits expects u,v\n";
      return kExitError;
    }
    trace = gen::gen_equality_trace(config.bits.substr(0, comma), config.bits.substr(comma + 1));
  } else {
    trace = gen::gen_random(config.gen);
  }
  write_trace(*sink, trace);
  return kExitClean;
}

int run_oracle(const RunConfig& config, std::ostream& out, std::ostream& err) {
  Input in = open_input(config.input);
  Trace trace = read_trace(*in.stream);
  const ValidationReport report = validate(trace);
  if (!report.ok) return report_invalid(report.violations, err);
  report_warnings(report.violations, err);
  if (report.flattened > 0) trace = flatten_reentrant(trace);

  const oracle::Relations rel = oracle::compute_all(trace, config.bound);
  oracle::dump(out, rel.hb);
  oracle::dump(out, rel.cp_prec);
  oracle::dump(out, rel.wcp_prec);

  bool wcp_race = false;
  for (const oracle::OrderRelation* r : {&rel.hb, &rel.cp_le, &rel.wcp_le}) {
    for (const auto& [a, b] : oracle::races_of(trace, *r)) {
      out << "ORACLE_RACE|" << oracle::relation_name(r->kind()) << '|' << a << '|' << b << '|'
          << trace.symbols.location(trace.events[a]) << '|'
          << trace.symbols.location(trace.events[b]) << '\n';
      if (r == &rel.wcp_le) wcp_race = true;
    }
  }
  return wcp_race ? kExitFound : kExitClean;
}

}  // namespace

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    if (config.format != "std") {
      err << "error: unsupported trace format '" << config.format << "'\n";
      return kExitError;
    }
    switch (config.command) {
      case Command::Analyze: return run_analyze(config, out, err);
      case Command::Validate: return run_validate(config, out);
      case Command::Generate: return run_generate(config, out, err);
      case Command::Oracle: return run_oracle(config, out, err);
    }
  } catch (const ParseError& e) {
    err << "error: line " << e.line_no() << ": " << e.reason() << '\n';
  } catch (const oracle::BoundExceeded& e) {
    err << "error: " << e.what() << '\n';
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
  }
  return kExitError;
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Data-race prediction over logged execution traces"};
  app.require_subcommand(1);
  RunConfig config;

  std::string detector = "wcp";
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("input", config.input, "Trace file, or - for stdin")->capture_default_str();
    sub->add_option("--format", config.format, "Trace format")
        ->check(CLI::IsMember({"std"}))
        ->capture_default_str();
  };

  auto* analyze = app.add_subcommand("analyze", "Report races in a trace");
  add_common(analyze);
  analyze->add_option("--detector", detector, "wcp, hb or both")
      ->check(CLI::IsMember({"wcp", "hb", "both"}))
      ->capture_default_str();
  analyze->add_flag("--pairs,!--no-pairs", config.pairs,
                    "Resolve flags into location pairs with a second pass (default on)");
  analyze->add_option("--pair-budget", config.pair_budget,
                      "Maximum retained accesses during pair resolution")
      ->capture_default_str();
  analyze->add_flag("--dump-timestamps", config.dump_timestamps, "Print per-event clocks");
  analyze->add_flag("--gc-history", config.gc_history,
                    "Drop lock history consumed by every thread (buffers the input)");
  analyze->add_option("--metrics", config.metrics_out, "Write key=value metrics to FILE");

  auto* validate_cmd = app.add_subcommand("validate", "Check a trace for well-formedness");
  add_common(validate_cmd);

  auto* generate = app.add_subcommand("generate", "Write a trace");
  generate->add_option("-o,--output", config.output, "Output file, or - for stdout")
      ->capture_default_str();
  generate->add_option("--fixture,--name", config.fixture, "Named example trace");
  generate->add_option("--gen-bits,--bits", config.bits, "Equality trace for bit strings u,v");
  generate->add_flag("--gen-random", config.gen_random, "Random well-formed trace");
  generate->add_option("--scaling", config.scaling_events,
                       "Scaling workload with N events (uses --threads, --locks, --seed)");
  generate->add_option("--threads", config.gen.threads)->capture_default_str();
  generate->add_option("--locks", config.gen.locks)->capture_default_str();
  generate->add_option("--vars", config.gen.vars)->capture_default_str();
  generate->add_option("--events", config.gen.events)->capture_default_str();
  generate->add_option("--p-lock", config.gen.p_lock)->capture_default_str();
  generate->add_option("--p-write", config.gen.p_write)->capture_default_str();
  generate->add_option("--max-nesting", config.gen.max_nesting)->capture_default_str();
  generate->add_option("--seed", config.gen.seed)->capture_default_str();
  generate->add_flag("--dangling", config.gen.dangling, "Leave sections open at the end");
  generate->add_flag("--fork-join", config.gen.fork_join, "Wrap threads in fork/join");

  auto* oracle_cmd = app.add_subcommand("oracle", "Brute-force relations of a small trace");
  add_common(oracle_cmd);
  oracle_cmd->add_option("--bound", config.bound, "Maximum trace length")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitClean;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitClean;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }

  if (*analyze) {
    config.command = Command::Analyze;
    config.detector = detector == "hb"     ? DetectorChoice::Hb
                      : detector == "both" ? DetectorChoice::Both
                                           : DetectorChoice::Wcp;
  } else if (*validate_cmd) {
    config.command = Command::Validate;
  } else if (*generate) {
    config.command = Command::Generate;
  } else {
    config.command = Command::Oracle;
  }
  return run(config, out, err);
}

}  // namespace wcp::cli
