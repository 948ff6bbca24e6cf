#include "logmorph/event.hpp"

#include "logmorph/text.hpp"

#include <array>
#include <charconv>
#include <cstdio>

namespace logmorph {

namespace {

constexpr std::array<std::string_view, kSeverityCount> kSeverityNames = {
    "emergency", "alert", "critical", "error",    "warning",
    "notice",    "info",  "debug",    "security", "unknown"};

bool read_digits(std::string_view s, std::size_t& pos, std::size_t count,
                 int& out) {
  if (pos + count > s.size()) return false;
  int v = 0;
  for (std::size_t i = 0; i < count; ++i) {
    const char c = s[pos + i];
    if (c < '0' || c > '9') return false;
    v = v * 10 + (c - '0');
  }
  pos += count;
  out = v;
  return true;
}

}  // namespace

std::string_view to_string(Severity s) noexcept {
  return kSeverityNames[static_cast<std::size_t>(s)];
}

std::optional<Severity> parse_severity(std::string_view s) {
  const std::string lower = text::to_lower_ascii(text::trim(s));
  for (std::size_t i = 0; i < kSeverityNames.size(); ++i) {
    if (lower == kSeverityNames[i]) return static_cast<Severity>(i);
  }
  if (lower == "emerg") return Severity::Emergency;
  if (lower == "crit") return Severity::Critical;
  if (lower == "err") return Severity::Error;
  if (lower == "warn") return Severity::Warning;
  if (lower == "information") return Severity::Info;
  unsigned code = 0;
  const auto* end = lower.data() + lower.size();
  const auto [ptr, ec] = std::from_chars(lower.data(), end, code);
  if (ec == std::errc{} && ptr == end && !lower.empty() && code <= 7) {
    return static_cast<Severity>(code);
  }
  return std::nullopt;
}

const std::string* MailEvent::find(std::string_view key) const {
  for (const auto& [k, v] : kv) {
    if (k == key) return &v;
  }
  return nullptr;
}

std::string format_timestamp(Timestamp t) {
  using namespace std::chrono;
  const auto day = floor<days>(t);
  const year_month_day ymd{day};
  const hh_mm_ss hms{t - day};
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02d",
                static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()),
                static_cast<int>(hms.hours().count()),
                static_cast<int>(hms.minutes().count()),
                static_cast<int>(hms.seconds().count()));
  std::string out = buf;
  auto micros = hms.subseconds().count();
  if (micros != 0) {
    char frac[8];
    std::snprintf(frac, sizeof frac, "%06lld", static_cast<long long>(micros));
    std::string f = frac;
    while (!f.empty() && f.back() == '0') f.pop_back();
    out += '.';
    out += f;
  }
  out += 'Z';
  return out;
}

std::optional<Timestamp> parse_iso_timestamp(std::string_view s) {
  using namespace std::chrono;
  std::size_t pos = 0;
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, sec = 0;
  if (!read_digits(s, pos, 4, y)) return std::nullopt;
  if (pos >= s.size() || s[pos++] != '-') return std::nullopt;
  if (!read_digits(s, pos, 2, mo)) return std::nullopt;
  if (pos >= s.size() || s[pos++] != '-') return std::nullopt;
  if (!read_digits(s, pos, 2, d)) return std::nullopt;
  if (pos >= s.size() || (s[pos] != 'T' && s[pos] != ' ')) return std::nullopt;
  ++pos;
  if (!read_digits(s, pos, 2, h)) return std::nullopt;
  if (pos >= s.size() || s[pos++] != ':') return std::nullopt;
  if (!read_digits(s, pos, 2, mi)) return std::nullopt;
  if (pos >= s.size() || s[pos++] != ':') return std::nullopt;
  if (!read_digits(s, pos, 2, sec)) return std::nullopt;

  long long micros = 0;
  if (pos < s.size() && (s[pos] == '.' || s[pos] == ',')) {
    ++pos;
    int digits = 0;
    while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') {
      if (digits < 6) {
        micros = micros * 10 + (s[pos] - '0');
      }
      ++digits;
      ++pos;
    }
    if (digits == 0) return std::nullopt;
    for (int k = digits; k < 6; ++k) micros *= 10;
  }

  minutes offset{0};
  if (pos < s.size()) {
    if (s[pos] == 'Z' || s[pos] == 'z') {
      ++pos;
    } else if (s[pos] == '+' || s[pos] == '-') {
      const int sign = s[pos] == '-' ? -1 : 1;
      ++pos;
      int oh = 0, om = 0;
      if (!read_digits(s, pos, 2, oh)) return std::nullopt;
      if (pos < s.size() && s[pos] == ':') ++pos;
      if (!read_digits(s, pos, 2, om)) return std::nullopt;
      offset = minutes{sign * (oh * 60 + om)};
    }
  }
  if (pos != s.size()) return std::nullopt;

  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)},
                           day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || sec > 60) return std::nullopt;
  Timestamp t = sys_days{ymd} + hours{h} + minutes{mi} + seconds{sec} +
                microseconds{micros};
  return t - offset;
}

}  // namespace logmorph
