#include "logmorph/rules.hpp"

#include "logmorph/error.hpp"
#include "logmorph/text.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <unordered_set>

namespace logmorph {

namespace {

constexpr std::array<std::string_view, kCategoryCount> kCategoryNames = {
    "info",     "notice",   "debug", "alert",    "warning",
    "critical", "security", "error", "emergency"};

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && line[pos] == '\t') ++pos;
    const std::size_t start = pos;
    while (pos < line.size() && line[pos] != '\t') ++pos;
    if (pos > start) fields.push_back(line.substr(start, pos - start));
  }
  return fields;
}

template <class Int>
std::optional<Int> parse_int(std::string_view s) {
  Int v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
    return std::nullopt;
  }
  return v;
}

}  // namespace

std::string_view to_string(Category c) noexcept {
  return kCategoryNames[static_cast<std::size_t>(c)];
}

std::optional<Category> parse_category(std::string_view s) {
  const std::string lower = text::to_lower_ascii(text::trim(s));
  for (std::size_t i = 0; i < kCategoryNames.size(); ++i) {
    if (lower == kCategoryNames[i]) return static_cast<Category>(i);
  }
  return std::nullopt;
}

bool ClassificationRule::applies_to(const EventRecord& e) const {
  if (id_match && (!e.event_id || *e.event_id != *id_match)) return false;
  if (source_pattern && (!e.source || !source_pattern->search(*e.source))) {
    return false;
  }
  return message_pattern.search(e.message);
}

RuleSet::RuleSet(std::vector<ClassificationRule> rules)
    : rules_(std::move(rules)) {
  std::unordered_set<std::string_view> names;
  for (const auto& r : rules_) {
    if (r.name.empty()) throw ConfigError("rule with empty name");
    if (!names.insert(r.name).second) {
      throw ConfigError("duplicate rule name '" + r.name + "'");
    }
  }
  std::stable_sort(rules_.begin(), rules_.end(),
                   [](const ClassificationRule& a, const ClassificationRule& b) {
                     return a.priority < b.priority;
                   });
}

std::optional<std::size_t> RuleSet::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < rules_.size(); ++i) {
    if (rules_[i].name == name) return i;
  }
  return std::nullopt;
}

std::array<std::size_t, kCategoryCount> RuleSet::category_tally() const {
  std::array<std::size_t, kCategoryCount> tally{};
  for (const auto& r : rules_) ++tally[static_cast<std::size_t>(r.category)];
  return tally;
}

RuleSet parse_rules(std::istream& in, std::string_view name) {
  std::vector<ClassificationRule> rules;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  const auto fail = [&](const std::string& why) -> ConfigError {
    return ConfigError(std::string(name) + ":" + std::to_string(line_no) +
                       ": " + why);
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string_view trimmed = text::trim(line);
    if (trimmed.empty() || trimmed.front() == '#') continue;

    const auto fields = split_tabs(line);
    if (fields.size() < 5 || fields.size() > 6) {
      throw fail("expected 5 or 6 tab-separated fields, found " +
                 std::to_string(fields.size()));
    }
    ClassificationRule rule;
    rule.line = line_no;
    rule.name = std::string(text::trim(fields[0]));
    if (!seen.insert(rule.name).second) {
      throw fail("duplicate rule name '" + rule.name + "'");
    }
    const auto cat = parse_category(fields[1]);
    if (!cat) throw fail("unknown category '" + std::string(fields[1]) + "'");
    rule.category = *cat;

    try {
      if (text::trim(fields[2]) != "-") rule.source_pattern.emplace(fields[2]);
      rule.message_pattern = Pattern(fields[4]);
    } catch (const ConfigError& e) {
      throw fail(e.what());
    }
    if (const auto id = text::trim(fields[3]); id != "-") {
      rule.id_match = parse_int<std::uint64_t>(id);
      if (!rule.id_match) throw fail("bad event id '" + std::string(id) + "'");
    }
    if (fields.size() == 6) {
      const auto prio = parse_int<std::int64_t>(text::trim(fields[5]));
      if (!prio) {
        throw fail("bad priority '" + std::string(fields[5]) + "'");
      }
      rule.priority = *prio;
    } else {
      rule.priority = static_cast<std::int64_t>(line_no);
    }
    rules.push_back(std::move(rule));
  }
  return RuleSet(std::move(rules));
}

RuleSet load_rules(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read rules " + path.string());
  return parse_rules(in, path.string());
}

std::optional<std::size_t> classify_index(const EventRecord& record,
                                          const RuleSet& rules) {
  const auto all = rules.rules();
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (all[i].applies_to(record)) return i;
  }
  return std::nullopt;
}

std::optional<ClassMatch> classify(const EventRecord& record,
                                   const RuleSet& rules) {
  const auto idx = classify_index(record, rules);
  if (!idx) return std::nullopt;
  const auto& rule = rules.rules()[*idx];
  return ClassMatch{record.seq, rule.name, rule.category};
}

ClassTally classify_all(std::span<const EventRecord> events,
                        const RuleSet& rules) {
  ClassTally tally;
  for (const auto& r : rules.rules()) {
    tally.class_names.push_back(r.name);
    tally.class_categories.push_back(r.category);
  }
  tally.per_class.assign(rules.size(), 0);
  for (const auto& e : events) {
    ++tally.total;
    const auto sev = static_cast<std::size_t>(e.severity);
    const auto idx = classify_index(e, rules);
    if (!idx) {
      ++tally.unmatched;
      ++tally.unmatched_by_severity[sev];
      continue;
    }
    const auto cat = static_cast<std::size_t>(rules.rules()[*idx].category);
    ++tally.per_class[*idx];
    ++tally.per_category[cat];
    ++tally.cross_tab[sev][cat];
  }
  return tally;
}

}  // namespace logmorph
