#pragma once

#include "logmorph/event.hpp"
#include "logmorph/pattern.hpp"
#include "logmorph/store.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace logmorph {

/// Rule categories, in report order.
enum class Category : std::uint8_t {
  Info,
  Notice,
  Debug,
  Alert,
  Warning,
  Critical,
  Security,
  Error,
  Emergency,
};

inline constexpr std::size_t kCategoryCount = 9;

std::string_view to_string(Category c) noexcept;
std::optional<Category> parse_category(std::string_view s);

struct ClassificationRule {
  std::string name;
  Category category = Category::Info;
  std::optional<Pattern> source_pattern;
  std::optional<std::uint64_t> id_match;
  Pattern message_pattern{""};
  /// Lower wins; ties broken by file order.
  std::int64_t priority = 0;
  std::size_t line = 0;

  bool applies_to(const EventRecord& e) const;
};

/// Immutable after loading; rules are held in evaluation order.
class RuleSet {
 public:
  RuleSet() = default;
  /// Validates unique names and sorts by (priority, file order).
  explicit RuleSet(std::vector<ClassificationRule> rules);

  std::span<const ClassificationRule> rules() const noexcept { return rules_; }
  std::size_t size() const noexcept { return rules_.size(); }
  bool empty() const noexcept { return rules_.empty(); }
  /// Index into rules() by name.
  std::optional<std::size_t> index_of(std::string_view name) const;
  std::array<std::size_t, kCategoryCount> category_tally() const;

 private:
  std::vector<ClassificationRule> rules_;
};

/// Tab-separated: name, category, source pattern or "-", event id or "-",
/// message pattern, optional numeric priority. "#" starts a comment line.
/// Throws ConfigError naming the offending line.
RuleSet parse_rules(std::istream& in, std::string_view name = "<rules>");
RuleSet load_rules(const std::filesystem::path& path);

struct ClassMatch {
  std::uint64_t seq = 0;
  std::string rule;
  Category category = Category::Info;
};

/// First rule in evaluation order that applies, or nullopt.
std::optional<ClassMatch> classify(const EventRecord& record,
                                   const RuleSet& rules);
/// Index of the matching rule, for callers that tally by position.
std::optional<std::size_t> classify_index(const EventRecord& record,
                                          const RuleSet& rules);

struct ClassTally {
  /// Parallel to RuleSet::rules().
  std::vector<std::string> class_names;
  std::vector<Category> class_categories;
  std::vector<std::size_t> per_class;
  std::array<std::size_t, kCategoryCount> per_category{};
  std::size_t unmatched = 0;
  std::size_t total = 0;
  /// cross_tab[severity][category]: events of that transport severity
  /// classified into that category.
  std::array<std::array<std::size_t, kCategoryCount>, kSeverityCount>
      cross_tab{};
  /// Events per transport severity that matched no rule.
  std::array<std::size_t, kSeverityCount> unmatched_by_severity{};
};

ClassTally classify_all(std::span<const EventRecord> events,
                        const RuleSet& rules);

}  // namespace logmorph
