#pragma once

#include "logmorph/event.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace logmorph {

struct StoreMeta {
  std::size_t count = 0;
  std::optional<Timestamp> first;
  std::optional<Timestamp> last;
  std::size_t distinct_hosts = 0;
  std::size_t distinct_sources = 0;
};

/// Append-only collection of events in ingest (seq) order. Time ordering is
/// applied on iteration, so the on-disk layout keeps ingest provenance.
class EventStore {
 public:
  /// Assigns the next sequence number and returns it.
  std::uint64_t append(EventRecord record);
  /// Keeps record.seq, which must exceed every stored seq.
  void append_with_seq(EventRecord record);

  std::span<const EventRecord> events() const noexcept { return events_; }
  std::size_t size() const noexcept { return events_.size(); }
  bool empty() const noexcept { return events_.empty(); }

  /// Events sorted by (occurred_at, seq).
  std::vector<const EventRecord*> time_ordered() const;
  const EventRecord* find(std::uint64_t seq) const;
  StoreMeta meta() const;

  friend bool operator==(const EventStore&, const EventStore&) = default;

 private:
  std::vector<EventRecord> events_;
  std::uint64_t next_seq_ = 1;
};

template <class T>
struct Range {
  T lo;
  T hi;
  bool contains(const T& v) const { return !(v < lo) && !(hi < v); }
};

/// Conjunction of optional field constraints. No constraints matches all.
struct EventFilter {
  std::optional<std::string> host;
  std::optional<std::string> source;
  std::optional<Range<std::uint64_t>> event_id;
  std::optional<Range<Severity>> severity;
  std::optional<Timestamp> since;  // inclusive
  std::optional<Timestamp> until;  // inclusive

  bool matches(const EventRecord& e) const;
  bool unconstrained() const;
};

/// Matching events in (occurred_at, seq) order.
std::vector<EventRecord> select(const EventStore& store,
                                const EventFilter& filter);
/// Matching events as a new store in seq order with their original seqs.
EventStore filtered(const EventStore& store, const EventFilter& filter);

/// Canonical record layout: keys ts, host, source, id, pid, sev, msg, raw,
/// seq in that order; absent optionals omitted. `raw` is a JSON string when
/// it is valid UTF-8 and {"b64": "..."} otherwise.
std::string to_json_line(const EventRecord& e);
/// Throws ParseError(line_no, reason) on malformed input.
EventRecord from_json_line(std::string_view line, std::size_t line_no);

void write_store(const EventStore& store, std::ostream& out);
void write_store(const EventStore& store, const std::filesystem::path& path);
/// Throws IoError naming the source and line number on malformed input.
EventStore read_store(std::istream& in, std::string_view name = "<stream>");
EventStore read_store(const std::filesystem::path& path);

}  // namespace logmorph
