#include "logmorph/ingest.hpp"

#include "logmorph/error.hpp"
#include "logmorph/text.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <iterator>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace logmorph {

Priority decode_priority(int pri) {
  if (pri < 0 || pri > 191) {
    throw std::out_of_range("syslog priority " + std::to_string(pri) +
                            " outside 0..191");
  }
  return {pri / 8, static_cast<Severity>(pri % 8)};
}

namespace {

constexpr std::array<std::string_view, 12> kMonths = {
    "Jan", "Feb", "Mar", "Apr", "May", "Jun",
    "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};

template <class Int>
std::optional<Int> parse_uint(std::string_view s) {
  if (s.empty()) return std::nullopt;
  Int v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

void skip_spaces(std::string_view s, std::size_t& pos) {
  while (pos < s.size() && s[pos] == ' ') ++pos;
}

std::string_view next_token(std::string_view s, std::size_t& pos) {
  skip_spaces(s, pos);
  const std::size_t start = pos;
  while (pos < s.size() && s[pos] != ' ' && s[pos] != '\t') ++pos;
  return s.substr(start, pos - start);
}

Timestamp make_local(std::chrono::year_month_day ymd, int h, int m, int sec,
                     long long micros, std::chrono::minutes offset) {
  using namespace std::chrono;
  return Timestamp{sys_days{ymd}} + hours{h} + minutes{m} + seconds{sec} +
         microseconds{micros} - offset;
}

/// "hh:mm:ss[.frac]".
bool parse_clock(std::string_view s, int& h, int& m, int& sec,
                 long long& micros) {
  const auto colon1 = s.find(':');
  const auto colon2 = s.find(':', colon1 == std::string_view::npos
                                      ? colon1
                                      : colon1 + 1);
  if (colon1 == std::string_view::npos || colon2 == std::string_view::npos) {
    return false;
  }
  auto sec_part = s.substr(colon2 + 1);
  std::string_view frac;
  if (const auto dot = sec_part.find_first_of(".,");
      dot != std::string_view::npos) {
    frac = sec_part.substr(dot + 1);
    sec_part = sec_part.substr(0, dot);
    if (frac.empty()) return false;
  }
  const auto hh = parse_uint<int>(s.substr(0, colon1));
  const auto mm = parse_uint<int>(s.substr(colon1 + 1, colon2 - colon1 - 1));
  const auto ss = parse_uint<int>(sec_part);
  if (!hh || !mm || !ss || *hh > 23 || *mm > 59 || *ss > 60) return false;
  micros = 0;
  int digits = 0;
  for (char c : frac) {
    if (c < '0' || c > '9') return false;
    if (digits < 6) micros = micros * 10 + (c - '0');
    ++digits;
  }
  for (int k = digits; k < 6 && digits > 0; ++k) micros *= 10;
  h = *hh;
  m = *mm;
  sec = *ss;
  return true;
}

/// Reads the timestamp at the start of `line` (after PRI) and advances pos.
std::optional<Timestamp> parse_syslog_stamp(std::string_view line,
                                            std::size_t& pos,
                                            const ParseOptions& opts) {
  using namespace std::chrono;
  skip_spaces(line, pos);
  const std::size_t start = pos;
  const std::string_view first = next_token(line, pos);
  if (first.size() >= 19 && first[4] == '-') {
    auto t = parse_iso_timestamp(first);
    if (!t) return std::nullopt;
    // Zone-less ISO stamps are local time like their BSD counterparts.
    const bool has_zone = first.back() == 'Z' || first.back() == 'z' ||
                          first.find_first_of("+-", 19) != std::string_view::npos;
    if (!has_zone) *t -= opts.utc_offset;
    return t;
  }

  pos = start;
  const std::string_view mon = next_token(line, pos);
  std::size_t month_index = kMonths.size();
  for (std::size_t i = 0; i < kMonths.size(); ++i) {
    if (mon == kMonths[i]) month_index = i;
  }
  if (month_index == kMonths.size()) return std::nullopt;
  const auto day_num = parse_uint<unsigned>(next_token(line, pos));
  if (!day_num) return std::nullopt;
  int h = 0, m = 0, s = 0;
  long long micros = 0;
  if (!parse_clock(next_token(line, pos), h, m, s, micros)) {
    return std::nullopt;
  }
  const year_month_day ymd{year{opts.year},
                           month{static_cast<unsigned>(month_index + 1)},
                           day{*day_num}};
  if (!ymd.ok()) return std::nullopt;
  return make_local(ymd, h, m, s, micros, opts.utc_offset);
}

bool valid_tag_name(std::string_view name) {
  if (name.empty()) return false;
  for (char c : name) {
    if (c == '[' || c == ']' || c == ':' || c == ' ' || c == '\t') {
      return false;
    }
  }
  return true;
}

/// "name:", "name[pid]:" or "name[pid]". Returns false when `token` is
/// ordinary message text.
bool split_tag(std::string_view token, std::string_view& name,
               std::optional<std::uint64_t>& pid) {
  pid.reset();
  if (!token.empty() && token.back() == ':') token.remove_suffix(1);
  else if (token.empty() || token.back() != ']') return false;

  if (!token.empty() && token.back() == ']') {
    const auto open = token.find('[');
    if (open == std::string_view::npos) return false;
    const auto digits = token.substr(open + 1, token.size() - open - 2);
    const auto value = parse_uint<std::uint64_t>(digits);
    if (!value) return false;
    name = token.substr(0, open);
    pid = value;
    return valid_tag_name(name);
  }
  name = token;
  return valid_tag_name(name);
}

std::string strip_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return std::string(line);
}

}  // namespace

EventRecord parse_syslog_line(std::string_view line, const ParseOptions& opts,
                              std::size_t line_no) {
  const std::string body = strip_cr(line);
  const std::string_view s = body;
  EventRecord rec;
  rec.raw = std::string(line);
  std::size_t pos = 0;

  if (!s.empty() && s[0] == '<') {
    const auto close = s.find('>');
    if (close == std::string_view::npos || close < 2 || close > 4) {
      throw ParseError(line_no, "malformed priority field");
    }
    const auto pri = parse_uint<int>(s.substr(1, close - 1));
    if (!pri) throw ParseError(line_no, "malformed priority field");
    try {
      rec.severity = decode_priority(*pri).severity;
    } catch (const std::out_of_range& e) {
      throw ParseError(line_no, e.what());
    }
    pos = close + 1;
  }

  const auto stamp = parse_syslog_stamp(s, pos, opts);
  if (!stamp) throw ParseError(line_no, "unparseable timestamp");
  rec.occurred_at = *stamp;

  const std::string_view host = next_token(s, pos);
  if (host.empty()) throw ParseError(line_no, "missing host");
  rec.host = text::casefold(text::sanitize_utf8(host));

  skip_spaces(s, pos);
  std::size_t after_tag = pos;
  const std::string_view tag = next_token(s, after_tag);
  std::string_view name;
  std::optional<std::uint64_t> pid;
  if (split_tag(tag, name, pid)) {
    rec.source = text::sanitize_utf8(name);
    rec.pid = pid;
    pos = after_tag;
  }
  rec.message = text::single_line(text::trim(s.substr(std::min(pos, s.size()))));
  if (rec.message.empty()) throw ParseError(line_no, "empty message");
  return rec;
}

EventRecord parse_syslog_line(std::string_view line, int default_year) {
  ParseOptions opts;
  opts.year = default_year;
  return parse_syslog_line(line, opts);
}

// -- Windows CSV ------------------------------------------------------------

WindowsCsvHeader WindowsCsvHeader::from_cells(
    std::span<const std::string> cells) {
  std::optional<std::size_t> level, date_time, source, event_id, message,
      task, computer;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    std::string_view name = text::trim(cells[i]);
    // Excel-produced exports start with a byte-order mark.
    if (i == 0 && name.starts_with("\xEF\xBB\xBF")) name.remove_prefix(3);
    if (text::iequals_ascii(name, "Level")) level = i;
    else if (text::iequals_ascii(name, "Date and Time")) date_time = i;
    else if (text::iequals_ascii(name, "Source")) source = i;
    else if (text::iequals_ascii(name, "Event ID")) event_id = i;
    else if (text::iequals_ascii(name, "Message")) message = i;
    else if (text::iequals_ascii(name, "Task Category")) task = i;
    else if (text::iequals_ascii(name, "Computer")) computer = i;
  }
  std::string missing;
  const auto need = [&](const std::optional<std::size_t>& col,
                        std::string_view name) {
    if (!col) {
      if (!missing.empty()) missing += ", ";
      missing += name;
    }
  };
  need(level, "Level");
  need(date_time, "Date and Time");
  need(source, "Source");
  need(event_id, "Event ID");
  need(message, "Message");
  if (!missing.empty()) {
    throw ConfigError("CSV header lacks required column(s): " + missing);
  }
  WindowsCsvHeader h;
  h.level = *level;
  h.date_time = *date_time;
  h.source = *source;
  h.event_id = *event_id;
  h.message = *message;
  h.task_category = task;
  h.computer = computer;
  return h;
}

namespace {

Severity map_level(std::string_view level) {
  level = text::trim(level);
  if (text::iequals_ascii(level, "Error")) return Severity::Error;
  if (text::iequals_ascii(level, "Warning")) return Severity::Warning;
  if (text::iequals_ascii(level, "Information")) return Severity::Info;
  return Severity::Unknown;
}

/// "2012-01-10 08:00:00", "1/10/2012 8:00:00 AM" or "10.01.2012 08:00:00".
std::optional<Timestamp> parse_windows_stamp(std::string_view s,
                                             const ParseOptions& opts) {
  using namespace std::chrono;
  s = text::trim(s);
  const auto parts = text::split_whitespace(s);
  if (parts.size() < 2 || parts.size() > 3) return std::nullopt;
  const std::string_view date = parts[0];

  int y = 0;
  unsigned mo = 0, d = 0;
  const auto split3 = [](std::string_view v, char sep,
                         std::array<std::string_view, 3>& out) {
    const auto a = v.find(sep);
    const auto b = a == std::string_view::npos ? a : v.find(sep, a + 1);
    if (b == std::string_view::npos) return false;
    out = {v.substr(0, a), v.substr(a + 1, b - a - 1), v.substr(b + 1)};
    return true;
  };
  std::array<std::string_view, 3> f;
  if (split3(date, '-', f)) {
    const auto yy = parse_uint<int>(f[0]);
    const auto mm = parse_uint<unsigned>(f[1]);
    const auto dd = parse_uint<unsigned>(f[2]);
    if (!yy || !mm || !dd) return std::nullopt;
    y = *yy, mo = *mm, d = *dd;
  } else if (split3(date, '/', f)) {
    const auto mm = parse_uint<unsigned>(f[0]);
    const auto dd = parse_uint<unsigned>(f[1]);
    const auto yy = parse_uint<int>(f[2]);
    if (!yy || !mm || !dd) return std::nullopt;
    y = *yy, mo = *mm, d = *dd;
  } else if (split3(date, '.', f)) {
    const auto dd = parse_uint<unsigned>(f[0]);
    const auto mm = parse_uint<unsigned>(f[1]);
    const auto yy = parse_uint<int>(f[2]);
    if (!yy || !mm || !dd) return std::nullopt;
    y = *yy, mo = *mm, d = *dd;
  } else {
    return std::nullopt;
  }

  int h = 0, m = 0, sec = 0;
  long long micros = 0;
  if (!parse_clock(parts[1], h, m, sec, micros)) return std::nullopt;
  if (parts.size() == 3) {
    const bool pm = text::iequals_ascii(parts[2], "PM");
    if (!pm && !text::iequals_ascii(parts[2], "AM")) return std::nullopt;
    if (h < 1 || h > 12) return std::nullopt;
    h = (h % 12) + (pm ? 12 : 0);
  }
  const year_month_day ymd{year{y}, month{mo}, day{d}};
  if (!ymd.ok()) return std::nullopt;
  return make_local(ymd, h, m, sec, micros, opts.utc_offset);
}

}  // namespace

EventRecord parse_windows_csv_row(std::span<const std::string> row,
                                  const WindowsCsvHeader& header,
                                  const ParseOptions& opts,
                                  std::size_t line_no) {
  const auto cell = [&](std::size_t idx) -> std::string_view {
    if (idx >= row.size()) {
      throw ParseError(line_no, "row has " + std::to_string(row.size()) +
                                    " cells; column " + std::to_string(idx + 1) +
                                    " missing");
    }
    return row[idx];
  };

  EventRecord rec;
  rec.severity = map_level(cell(header.level));
  const auto stamp = parse_windows_stamp(cell(header.date_time), opts);
  if (!stamp) throw ParseError(line_no, "unparseable Date and Time");
  rec.occurred_at = *stamp;

  const auto id_text = text::trim(cell(header.event_id));
  const auto id = parse_uint<std::uint64_t>(id_text);
  if (!id) {
    throw ParseError(line_no,
                     "Event ID is not an integer: '" + std::string(id_text) + "'");
  }
  rec.event_id = id;

  const auto source = text::trim(cell(header.source));
  if (!source.empty()) rec.source = text::sanitize_utf8(source);

  std::string_view host = opts.default_host;
  if (header.computer) {
    const auto c = text::trim(cell(*header.computer));
    if (!c.empty()) host = c;
  }
  rec.host = text::casefold(text::sanitize_utf8(host));
  rec.message = text::single_line(text::trim(cell(header.message)));
  return rec;
}

CsvReader::CsvReader(std::string_view data) : data_(data) {}

bool CsvReader::next(CsvRecord& record) {
  if (pos_ >= data_.size()) return false;
  record.cells.clear();
  record.line = line_;
  const std::size_t start = pos_;
  std::string cell;
  bool quoted = false;
  bool at_cell_start = true;

  while (pos_ < data_.size()) {
    const char c = data_[pos_];
    if (quoted) {
      if (c == '"') {
        if (pos_ + 1 < data_.size() && data_[pos_ + 1] == '"') {
          cell.push_back('"');
          pos_ += 2;
          continue;
        }
        quoted = false;
        ++pos_;
        continue;
      }
      if (c == '\n') ++line_;
      cell.push_back(c);
      ++pos_;
      continue;
    }
    if (c == '"' && at_cell_start) {
      quoted = true;
      at_cell_start = false;
      ++pos_;
      continue;
    }
    if (c == ',') {
      record.cells.push_back(std::move(cell));
      cell.clear();
      at_cell_start = true;
      ++pos_;
      continue;
    }
    if (c == '\n' || c == '\r') {
      std::size_t end = pos_;
      if (c == '\r' && pos_ + 1 < data_.size() && data_[pos_ + 1] == '\n') {
        ++pos_;
      }
      ++pos_;
      ++line_;
      record.cells.push_back(std::move(cell));
      record.raw = std::string(data_.substr(start, end - start));
      return true;
    }
    cell.push_back(c);
    at_cell_start = false;
    ++pos_;
  }
  if (quoted) {
    record.raw = std::string(data_.substr(start));
    throw ParseError(record.line, "unterminated quoted field");
  }
  record.cells.push_back(std::move(cell));
  record.raw = std::string(data_.substr(start));
  return true;
}

// -- sendmail ---------------------------------------------------------------

namespace {

bool is_queue_id(std::string_view token) {
  if (token.size() < 8) return false;
  for (char c : token) {
    const bool alnum = (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') ||
                       (c >= 'A' && c <= 'Z');
    if (!alnum) return false;
  }
  return true;
}

bool is_key(std::string_view key) {
  if (key.empty()) return false;
  const char first = key.front();
  if (!((first >= 'a' && first <= 'z') || (first >= 'A' && first <= 'Z'))) {
    return false;
  }
  for (char c : key) {
    const bool ok = (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') ||
                    (c >= 'A' && c <= 'Z') || c == '_' || c == '-';
    if (!ok) return false;
  }
  return true;
}

}  // namespace

MailEvent parse_sendmail_line(std::string_view line, const ParseOptions& opts,
                              std::size_t line_no) {
  MailEvent ev;
  ev.base = parse_syslog_line(line, opts, line_no);
  if (!ev.base.source) {
    throw ParseError(line_no, "mail line lacks a program tag");
  }
  std::string_view body = ev.base.message;

  const auto colon = body.find(": ");
  if (colon != std::string_view::npos && is_queue_id(body.substr(0, colon))) {
    ev.queue_id = std::string(body.substr(0, colon));
    body = text::trim(body.substr(colon + 2));
  } else if (body.ends_with(':') && is_queue_id(body.substr(0, body.size() - 1))) {
    ev.queue_id = std::string(body.substr(0, body.size() - 1));
    body = {};
  }

  // Fragments split at commas; a fragment that is not key=value and follows
  // a value without intervening space continues that value (to=<a>,<b>).
  bool last_was_kv = false;
  std::size_t last_kv_index = 0;
  std::size_t pos = 0;
  while (pos <= body.size() && !body.empty()) {
    auto comma = body.find(',', pos);
    if (comma == std::string_view::npos) comma = body.size();
    const std::string_view raw_frag = body.substr(pos, comma - pos);
    const std::string_view frag = text::trim(raw_frag);
    pos = comma + 1;
    if (frag.empty()) {
      if (comma == body.size()) break;
      continue;
    }
    const auto eq = frag.find('=');
    if (eq != std::string_view::npos && is_key(frag.substr(0, eq))) {
      std::string key(frag.substr(0, eq));
      std::string value(frag.substr(eq + 1));
      bool replaced = false;
      for (std::size_t i = 0; i < ev.kv.size(); ++i) {
        if (ev.kv[i].first == key) {
          ev.kv[i].second = std::move(value);
          ++ev.duplicate_keys;
          last_kv_index = i;
          replaced = true;
          break;
        }
      }
      if (!replaced) {
        ev.kv.emplace_back(std::move(key), std::move(value));
        last_kv_index = ev.kv.size() - 1;
      }
      last_was_kv = true;
    } else if (last_was_kv && !raw_frag.empty() && raw_frag.front() != ' ') {
      ev.kv[last_kv_index].second += ',';
      ev.kv[last_kv_index].second += frag;
    } else {
      ev.rest.emplace_back(frag);
      last_was_kv = false;
    }
    if (comma == body.size()) break;
  }
  return ev;
}

MailEvent parse_sendmail_line(std::string_view line, int default_year) {
  ParseOptions opts;
  opts.year = default_year;
  return parse_sendmail_line(line, opts);
}

// -- file ingest ------------------------------------------------------------

std::string_view to_string(InputFormat f) noexcept {
  switch (f) {
    case InputFormat::Syslog: return "syslog";
    case InputFormat::WinCsv: return "wincsv";
    case InputFormat::Sendmail: return "sendmail";
    case InputFormat::Ndjson: return "ndjson";
  }
  return "?";
}

std::optional<InputFormat> parse_input_format(std::string_view s) {
  for (auto f : {InputFormat::Syslog, InputFormat::WinCsv,
                 InputFormat::Sendmail, InputFormat::Ndjson}) {
    if (text::iequals_ascii(s, to_string(f))) return f;
  }
  return std::nullopt;
}

namespace {

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::string data{std::istreambuf_iterator<char>(in),
                   std::istreambuf_iterator<char>()};
  if (in.bad()) throw IoError("error reading " + path.string());
  return data;
}

/// Splits on LF; a trailing LF does not open another line.
std::vector<std::string_view> split_lines(std::string_view data) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < data.size()) {
    auto nl = data.find('\n', start);
    if (nl == std::string_view::npos) nl = data.size();
    lines.push_back(data.substr(start, nl - start));
    start = nl + 1;
  }
  return lines;
}

struct Parsed {
  std::vector<EventRecord> events;
  std::vector<Reject> rejects;
  std::size_t duplicate_keys = 0;
};

Parsed parse_file(const std::filesystem::path& path, InputFormat format,
                  const ParseOptions& opts) {
  const std::string data = slurp(path);
  const std::string file = path.string();
  Parsed out;
  const auto reject = [&](std::size_t line, std::string reason,
                          std::string_view raw) {
    out.rejects.push_back({file, line, std::move(reason), std::string(raw)});
  };

  if (format == InputFormat::WinCsv) {
    CsvReader reader(data);
    CsvRecord rec;
    if (!reader.next(rec)) return out;
    const auto header = WindowsCsvHeader::from_cells(rec.cells);
    while (true) {
      try {
        if (!reader.next(rec)) break;
      } catch (const ParseError& e) {
        reject(e.line(), e.reason(), rec.raw);
        break;
      }
      try {
        EventRecord ev = parse_windows_csv_row(rec.cells, header, opts, rec.line);
        ev.raw = rec.raw;
        out.events.push_back(std::move(ev));
      } catch (const ParseError& e) {
        reject(rec.line, e.reason(), rec.raw);
      }
    }
    return out;
  }

  const auto lines = split_lines(data);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    try {
      switch (format) {
        case InputFormat::Syslog:
          out.events.push_back(parse_syslog_line(lines[i], opts, line_no));
          break;
        case InputFormat::Sendmail: {
          MailEvent mail = parse_sendmail_line(lines[i], opts, line_no);
          out.duplicate_keys += mail.duplicate_keys;
          out.events.push_back(std::move(mail.base));
          break;
        }
        case InputFormat::Ndjson: {
          EventRecord ev = from_json_line(lines[i], line_no);
          ev.message = text::single_line(ev.message);
          out.events.push_back(std::move(ev));
          break;
        }
        case InputFormat::WinCsv:
          break;
      }
    } catch (const ParseError& e) {
      reject(line_no, e.reason(), lines[i]);
    }
  }
  return out;
}

void escape_field(std::string_view s, std::ostream& out) {
  for (char c : s) {
    switch (c) {
      case '\\': out << "\\\\"; break;
      case '\n': out << "\\n"; break;
      case '\r': out << "\\r"; break;
      case '\t': out << "\\t"; break;
      default: out << c;
    }
  }
}

}  // namespace

IngestSummary ingest_files(std::span<const std::filesystem::path> paths,
                           InputFormat format, const ParseOptions& opts,
                           EventStore& store) {
  IngestSummary summary;
  // Parse everything before committing so a fatal error leaves the store
  // untouched.
  std::vector<Parsed> parsed;
  parsed.reserve(paths.size());
  for (const auto& path : paths) {
    parsed.push_back(parse_file(path, format, opts));
  }
  for (std::size_t i = 0; i < paths.size(); ++i) {
    Parsed& p = parsed[i];
    FileSummary fs{paths[i].string(), p.events.size(), p.rejects.size()};
    for (auto& ev : p.events) store.append(std::move(ev));
    summary.accepted += fs.accepted;
    summary.rejected += fs.rejected;
    summary.duplicate_keys += p.duplicate_keys;
    summary.files.push_back(std::move(fs));
    for (auto& r : p.rejects) summary.rejects.push_back(std::move(r));
  }
  return summary;
}

void write_rejects(std::span<const Reject> rejects, std::ostream& out) {
  for (const auto& r : rejects) {
    escape_field(r.file, out);
    out << '\t' << r.line << '\t';
    escape_field(r.reason, out);
    out << '\t';
    escape_field(r.raw, out);
    out << '\n';
  }
}

}  // namespace logmorph
