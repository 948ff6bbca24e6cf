#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace logmorph {

using Clock = std::chrono::system_clock;
/// UTC instant; microsecond resolution keeps sub-second stamps when present.
using Timestamp = std::chrono::sys_time<std::chrono::microseconds>;

/// Transport severity. The first eight values are the syslog codes; Security
/// and Unknown are first-class because source labels are often unreliable.
enum class Severity : std::uint8_t {
  Emergency = 0,
  Alert = 1,
  Critical = 2,
  Error = 3,
  Warning = 4,
  Notice = 5,
  Info = 6,
  Debug = 7,
  Security = 8,
  Unknown = 9,
};

inline constexpr std::size_t kSeverityCount = 10;

std::string_view to_string(Severity s) noexcept;
/// Accepts names ("warning", case-insensitive) and syslog codes ("4").
std::optional<Severity> parse_severity(std::string_view s);

struct EventRecord {
  Timestamp occurred_at{};
  std::string host;
  std::optional<std::string> source;
  std::optional<std::uint64_t> event_id;
  std::optional<std::uint64_t> pid;
  Severity severity = Severity::Unknown;
  std::string message;
  std::string raw;
  std::uint64_t seq = 0;

  friend bool operator==(const EventRecord&, const EventRecord&) = default;
};

/// A sendmail-style record with its key=value body split out.
struct MailEvent {
  EventRecord base;
  /// First-seen key order; a repeated key keeps its slot, last value wins.
  std::vector<std::pair<std::string, std::string>> kv;
  std::optional<std::string> queue_id;
  /// Body fragments that are not key=value pairs.
  std::vector<std::string> rest;
  std::size_t duplicate_keys = 0;

  const std::string* find(std::string_view key) const;
};

/// ISO-8601 UTC, e.g. 2011-03-04T10:22:01Z or 2011-03-04T10:22:01.25Z.
std::string format_timestamp(Timestamp t);
/// Accepts YYYY-MM-DDTHH:MM:SS[.frac](Z|±HH:MM) and the same with a space
/// separator. A missing zone designator means UTC.
std::optional<Timestamp> parse_iso_timestamp(std::string_view s);

}  // namespace logmorph
