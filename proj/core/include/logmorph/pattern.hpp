#pragma once

#include <memory>
#include <string>
#include <string_view>

namespace logmorph {

/// A compiled regular expression in the portable dialect used by rule files
/// and mask stages: alternation, classes, anchors and bounded repetition.
/// Backreferences are rejected at construction so patterns stay portable to
/// linear-time engines.
///
/// Cheap to copy; the compiled program is shared and immutable.
class Pattern {
 public:
  /// Throws ConfigError when the expression does not compile.
  explicit Pattern(std::string_view expression, bool ignore_case = false);

  /// The whole of `s` matches.
  bool matches(std::string_view s) const;
  /// Some substring of `s` matches.
  bool search(std::string_view s) const;

  const std::string& expression() const noexcept { return expression_; }
  bool ignore_case() const noexcept { return ignore_case_; }

  /// Escapes regex metacharacters so `literal` matches itself.
  static std::string escape(std::string_view literal);

 private:
  struct Impl;
  std::string expression_;
  bool ignore_case_;
  std::shared_ptr<const Impl> impl_;
};

}  // namespace logmorph
