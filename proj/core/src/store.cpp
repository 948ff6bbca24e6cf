#include "logmorph/store.hpp"

#include "logmorph/error.hpp"
#include "logmorph/text.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>

namespace logmorph {

using Json = nlohmann::ordered_json;

std::uint64_t EventStore::append(EventRecord record) {
  record.seq = next_seq_++;
  events_.push_back(std::move(record));
  return events_.back().seq;
}

void EventStore::append_with_seq(EventRecord record) {
  if (!events_.empty() && record.seq <= events_.back().seq) {
    throw ArgumentError("seq " + std::to_string(record.seq) +
                        " does not exceed previous seq " +
                        std::to_string(events_.back().seq));
  }
  next_seq_ = record.seq + 1;
  events_.push_back(std::move(record));
}

std::vector<const EventRecord*> EventStore::time_ordered() const {
  std::vector<const EventRecord*> out;
  out.reserve(events_.size());
  for (const auto& e : events_) out.push_back(&e);
  std::stable_sort(out.begin(), out.end(),
                   [](const EventRecord* a, const EventRecord* b) {
                     if (a->occurred_at != b->occurred_at) {
                       return a->occurred_at < b->occurred_at;
                     }
                     return a->seq < b->seq;
                   });
  return out;
}

const EventRecord* EventStore::find(std::uint64_t seq) const {
  const auto it = std::lower_bound(
      events_.begin(), events_.end(), seq,
      [](const EventRecord& e, std::uint64_t s) { return e.seq < s; });
  if (it == events_.end() || it->seq != seq) return nullptr;
  return &*it;
}

StoreMeta EventStore::meta() const {
  StoreMeta m;
  m.count = events_.size();
  std::set<std::string_view> hosts;
  std::set<std::string_view> sources;
  for (const auto& e : events_) {
    if (!m.first || e.occurred_at < *m.first) m.first = e.occurred_at;
    if (!m.last || e.occurred_at > *m.last) m.last = e.occurred_at;
    hosts.insert(e.host);
    if (e.source) sources.insert(*e.source);
  }
  m.distinct_hosts = hosts.size();
  m.distinct_sources = sources.size();
  return m;
}

bool EventFilter::matches(const EventRecord& e) const {
  if (host && e.host != *host) return false;
  if (source && (!e.source || *e.source != *source)) return false;
  if (event_id && (!e.event_id || !event_id->contains(*e.event_id))) {
    return false;
  }
  if (severity && !severity->contains(e.severity)) return false;
  if (since && e.occurred_at < *since) return false;
  if (until && e.occurred_at > *until) return false;
  return true;
}

bool EventFilter::unconstrained() const {
  return !host && !source && !event_id && !severity && !since && !until;
}

std::vector<EventRecord> select(const EventStore& store,
                                const EventFilter& filter) {
  std::vector<EventRecord> out;
  for (const EventRecord* e : store.time_ordered()) {
    if (filter.matches(*e)) out.push_back(*e);
  }
  return out;
}

EventStore filtered(const EventStore& store, const EventFilter& filter) {
  EventStore out;
  for (const auto& e : store.events()) {
    if (filter.matches(e)) out.append_with_seq(e);
  }
  return out;
}

// -- canonical NDJSON -------------------------------------------------------

std::string to_json_line(const EventRecord& e) {
  Json j;
  j["ts"] = format_timestamp(e.occurred_at);
  j["host"] = e.host;
  if (e.source) j["source"] = *e.source;
  if (e.event_id) j["id"] = *e.event_id;
  if (e.pid) j["pid"] = *e.pid;
  if (e.severity == Severity::Security || e.severity == Severity::Unknown) {
    j["sev"] = std::string(to_string(e.severity));
  } else {
    j["sev"] = static_cast<int>(e.severity);
  }
  j["msg"] = e.message;
  if (text::is_valid_utf8(e.raw)) {
    j["raw"] = e.raw;
  } else {
    j["raw"] = Json{{"b64", text::base64_encode(e.raw)}};
  }
  j["seq"] = e.seq;
  return j.dump();
}

namespace {

const Json& require(const Json& j, const char* key, std::size_t line_no) {
  const auto it = j.find(key);
  if (it == j.end()) {
    throw ParseError(line_no, std::string("missing key '") + key + "'");
  }
  return *it;
}

std::string require_string(const Json& j, const char* key, std::size_t line_no) {
  const Json& v = require(j, key, line_no);
  if (!v.is_string()) {
    throw ParseError(line_no, std::string("key '") + key + "' is not a string");
  }
  return v.get<std::string>();
}

std::uint64_t as_uint(const Json& v, const char* key, std::size_t line_no) {
  if (!v.is_number_unsigned()) {
    throw ParseError(line_no, std::string("key '") + key +
                                  "' is not a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

}  // namespace

EventRecord from_json_line(std::string_view line, std::size_t line_no) {
  Json j;
  try {
    j = Json::parse(line);
  } catch (const nlohmann::json::parse_error& err) {
    throw ParseError(line_no, std::string("invalid JSON: ") + err.what());
  }
  if (!j.is_object()) throw ParseError(line_no, "record is not an object");

  EventRecord e;
  const std::string ts = require_string(j, "ts", line_no);
  const auto t = parse_iso_timestamp(ts);
  if (!t) throw ParseError(line_no, "bad timestamp '" + ts + "'");
  e.occurred_at = *t;
  e.host = require_string(j, "host", line_no);
  if (j.contains("source")) e.source = require_string(j, "source", line_no);
  if (j.contains("id")) e.event_id = as_uint(j["id"], "id", line_no);
  if (j.contains("pid")) e.pid = as_uint(j["pid"], "pid", line_no);

  const Json& sev = require(j, "sev", line_no);
  if (sev.is_number_unsigned() && sev.get<std::uint64_t>() <= 7) {
    e.severity = static_cast<Severity>(sev.get<std::uint64_t>());
  } else if (sev.is_string() && sev.get<std::string>() == "security") {
    e.severity = Severity::Security;
  } else if (sev.is_string() && sev.get<std::string>() == "unknown") {
    e.severity = Severity::Unknown;
  } else {
    throw ParseError(line_no, "bad severity value " + sev.dump());
  }

  e.message = require_string(j, "msg", line_no);
  const Json& raw = require(j, "raw", line_no);
  if (raw.is_string()) {
    e.raw = raw.get<std::string>();
  } else if (raw.is_object() && raw.contains("b64") && raw["b64"].is_string()) {
    try {
      e.raw = text::base64_decode(raw["b64"].get<std::string>());
    } catch (const ArgumentError& err) {
      throw ParseError(line_no, err.what());
    }
  } else {
    throw ParseError(line_no, "bad raw value");
  }
  e.seq = as_uint(require(j, "seq", line_no), "seq", line_no);
  return e;
}

void write_store(const EventStore& store, std::ostream& out) {
  for (const auto& e : store.events()) out << to_json_line(e) << '\n';
}

void write_store(const EventStore& store, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  write_store(store, out);
  out.flush();
  if (!out) throw IoError("error writing " + path.string());
}

EventStore read_store(std::istream& in, std::string_view name) {
  EventStore store;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    try {
      store.append_with_seq(from_json_line(line, line_no));
    } catch (const ParseError& e) {
      throw IoError(std::string(name) + ": " + e.what());
    } catch (const ArgumentError& e) {
      throw IoError(std::string(name) + ": line " + std::to_string(line_no) +
                    ": " + e.what());
    }
  }
  if (in.bad()) throw IoError("error reading " + std::string(name));
  return store;
}

EventStore read_store(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read store " + path.string());
  return read_store(in, path.string());
}

}  // namespace logmorph
