#pragma once

#include "logmorph/event.hpp"
#include "logmorph/store.hpp"

#include <chrono>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace logmorph {

struct Priority {
  int facility = 0;
  Severity severity = Severity::Emergency;
};

/// Splits a syslog PRI value (0..191) into facility and severity.
/// Throws std::out_of_range outside that range.
Priority decode_priority(int pri);

struct ParseOptions {
  /// BSD syslog stamps carry no year; there is no rollover inference.
  int year = 1970;
  /// Offset of the log's local time from UTC (local = UTC + offset).
  std::chrono::minutes utc_offset{0};
  /// Host for formats without a computer-name column.
  std::string default_host = "localhost";
};

/// BSD-style syslog: [<PRI>]TIMESTAMP HOST [TAG[PID]:] MESSAGE.
/// TIMESTAMP is "Mmm dd hh:mm:ss[.frac]" (year from options) or ISO-8601.
EventRecord parse_syslog_line(std::string_view line, const ParseOptions& opts,
                              std::size_t line_no = 1);
EventRecord parse_syslog_line(std::string_view line, int default_year);

/// Column positions of a Windows Event Viewer CSV export, matched by exact
/// header name ignoring case.
class WindowsCsvHeader {
 public:
  /// Throws ConfigError when a required column is missing.
  static WindowsCsvHeader from_cells(std::span<const std::string> cells);

  std::size_t level = 0;
  std::size_t date_time = 0;
  std::size_t source = 0;
  std::size_t event_id = 0;
  std::size_t message = 0;
  std::optional<std::size_t> task_category;
  std::optional<std::size_t> computer;
};

EventRecord parse_windows_csv_row(std::span<const std::string> row,
                                  const WindowsCsvHeader& header,
                                  const ParseOptions& opts,
                                  std::size_t line_no = 1);

/// One CSV record, which may span several physical lines.
struct CsvRecord {
  std::vector<std::string> cells;
  std::string raw;        // record bytes without the final line terminator
  std::size_t line = 0;   // 1-based physical line where the record starts
};

/// RFC 4180 reader over an in-memory buffer.
class CsvReader {
 public:
  explicit CsvReader(std::string_view data);
  /// Returns false at end of input. Throws ParseError for an unterminated
  /// quoted field.
  bool next(CsvRecord& record);

 private:
  std::string_view data_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
};

MailEvent parse_sendmail_line(std::string_view line, const ParseOptions& opts,
                              std::size_t line_no = 1);
MailEvent parse_sendmail_line(std::string_view line, int default_year);

enum class InputFormat { Syslog, WinCsv, Sendmail, Ndjson };

std::string_view to_string(InputFormat f) noexcept;
std::optional<InputFormat> parse_input_format(std::string_view s);

struct Reject {
  std::string file;
  std::size_t line = 0;
  std::string reason;
  std::string raw;
};

struct FileSummary {
  std::string path;
  std::size_t accepted = 0;
  std::size_t rejected = 0;
};

struct IngestSummary {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  /// Repeated keys within sendmail bodies (last value kept).
  std::size_t duplicate_keys = 0;
  std::vector<FileSummary> files;
  std::vector<Reject> rejects;
};

/// Parses every file in argument order and appends accepted events to
/// `store`. Per-line parse errors are tallied; an unreadable file or a CSV
/// without the required columns throws.
IngestSummary ingest_files(std::span<const std::filesystem::path> paths,
                           InputFormat format, const ParseOptions& opts,
                           EventStore& store);

/// Tab-separated: file, line, reason, raw. Backslash, CR and LF inside the
/// raw field are escaped so each reject stays on one line.
void write_rejects(std::span<const Reject> rejects, std::ostream& out);

}  // namespace logmorph
