#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "wcp/trace.hpp"

namespace wcp {

/// Thrown for malformed lines of the text trace format.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line_no, std::string reason);

  std::size_t line_no() const { return line_no_; }
  const std::string& reason() const { return reason_; }

 private:
  std::size_t line_no_;
  std::string reason_;
};

/// Parses `<tid>|<op>|<operand>[|<loc>]`, interning names into `symbols`.
/// The returned event has idx 0; the caller assigns positions.
Event parse_event_line(std::string_view line, Symbols& symbols, std::size_t line_no = 0);

/// Renders an event back into the text format. Absent locations are omitted.
std::string format_event(const Event& e, const Symbols& symbols);

/// True for lines that carry no event (blank or `#` comments).
bool is_skippable_line(std::string_view line);

/// Streams events out of a text trace one line at a time.
class TraceReader {
 public:
  TraceReader(std::istream& in, Symbols& symbols) : in_(in), symbols_(symbols) {}

  /// Next event with consecutive idx, or nullopt at end of input.
  std::optional<Event> next();

  std::size_t line_no() const { return line_no_; }

 private:
  std::istream& in_;
  Symbols& symbols_;
  std::string line_;
  std::size_t line_no_ = 0;
  EventIdx next_idx_ = 0;
};

Trace read_trace(std::istream& in);
Trace read_trace_file(const std::string& path);
Trace parse_trace(std::string_view text);

void write_trace(std::ostream& out, const Trace& trace);
std::string to_text(const Trace& trace);

}  // namespace wcp
