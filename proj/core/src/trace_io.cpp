#include "wcp/trace_io.hpp"

#include <array>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace wcp {

namespace {

bool is_id_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
         c == '_' || c == '.' || c == ':' || c == '$' || c == '-';
}

void check_id(std::string_view id, std::string_view what, std::size_t line_no) {
  if (id.empty()) throw ParseError(line_no, "empty " + std::string(what));
  for (char c : id) {
    if (!is_id_char(c)) {
      throw ParseError(line_no, "invalid character in " + std::string(what) + " '" +
                                    std::string(id) + "'");
    }
  }
}

std::optional<EventKind> kind_from_token(std::string_view op) {
  if (op == "acq") return EventKind::Acquire;
  if (op == "rel") return EventKind::Release;
  if (op == "r") return EventKind::Read;
  if (op == "w") return EventKind::Write;
  if (op == "fork") return EventKind::Fork;
  if (op == "join") return EventKind::Join;
  return std::nullopt;
}

}  // namespace

ParseError::ParseError(std::size_t line_no, std::string reason)
    : std::runtime_error("line " + std::to_string(line_no) + ": " + reason),
      line_no_(line_no),
      reason_(std::move(reason)) {}

bool is_skippable_line(std::string_view line) {
  return line.empty() || line.front() == '#';
}

Event parse_event_line(std::string_view line, Symbols& symbols, std::size_t line_no) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

  std::array<std::string_view, 4> fields;
  std::size_t count = 0;
  std::size_t start = 0;
  while (true) {
    const auto bar = line.find('|', start);
    if (count == fields.size()) throw ParseError(line_no, "too many fields");
    fields[count++] = line.substr(start, bar == std::string_view::npos ? bar : bar - start);
    if (bar == std::string_view::npos) break;
    start = bar + 1;
  }
  if (count < 3) throw ParseError(line_no, "expected 3 or 4 fields, got " + std::to_string(count));

  const auto kind = kind_from_token(fields[1]);
  if (!kind) throw ParseError(line_no, "unknown op '" + std::string(fields[1]) + "'");
  check_id(fields[0], "thread id", line_no);
  check_id(fields[2], "operand", line_no);
  if (count == 4) check_id(fields[3], "location", line_no);

  Event e;
  e.tid = symbols.threads.intern(fields[0]);
  e.kind = *kind;
  switch (*kind) {
    case EventKind::Acquire:
    case EventKind::Release: e.operand = symbols.locks.intern(fields[2]); break;
    case EventKind::Read:
    case EventKind::Write: e.operand = symbols.vars.intern(fields[2]); break;
    case EventKind::Fork:
    case EventKind::Join: e.operand = symbols.threads.intern(fields[2]); break;
  }
  e.loc = count == 4 ? symbols.locs.intern(fields[3]) : kNoLoc;
  return e;
}

std::string format_event(const Event& e, const Symbols& symbols) {
  std::string out = symbols.threads.name(e.tid);
  out += '|';
  out += kind_token(e.kind);
  out += '|';
  out += symbols.operand_name(e);
  if (e.loc != kNoLoc) {
    out += '|';
    out += symbols.locs.name(e.loc);
  }
  return out;
}

std::optional<Event> TraceReader::next() {
  while (std::getline(in_, line_)) {
    ++line_no_;
    std::string_view view = line_;
    if (!view.empty() && view.back() == '\r') view.remove_suffix(1);
    if (is_skippable_line(view)) continue;
    Event e = parse_event_line(view, symbols_, line_no_);
    e.idx = next_idx_++;
    return e;
  }
  return std::nullopt;
}

Trace read_trace(std::istream& in) {
  Trace trace;
  TraceReader reader(in, trace.symbols);
  while (auto e = reader.next()) trace.events.push_back(*e);
  return trace;
}

Trace read_trace_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trace file '" + path + "'");
  return read_trace(in);
}

Trace parse_trace(std::string_view text) {
  std::istringstream in{std::string(text)};
  return read_trace(in);
}

void write_trace(std::ostream& out, const Trace& trace) {
  for (const Event& e : trace.events) out << format_event(e, trace.symbols) << '\n';
}

std::string to_text(const Trace& trace) {
  std::ostringstream out;
  write_trace(out, trace);
  return out.str();
}

}  // namespace wcp
