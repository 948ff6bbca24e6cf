#include "logmorph/pattern.hpp"

#include "logmorph/error.hpp"

#include <boost/regex.hpp>

namespace logmorph {

struct Pattern::Impl {
  boost::regex re;
};

namespace {

// \1..\9, \g{n}, \k<name> and friends.
bool has_backreference(std::string_view expr) {
  for (std::size_t i = 0; i + 1 < expr.size(); ++i) {
    if (expr[i] != '\\') continue;
    const char next = expr[i + 1];
    if ((next >= '1' && next <= '9') || next == 'g' || next == 'k') {
      return true;
    }
    ++i;  // skip the escaped character
  }
  return false;
}

}  // namespace

Pattern::Pattern(std::string_view expression, bool ignore_case)
    : expression_(expression), ignore_case_(ignore_case) {
  if (has_backreference(expression)) {
    throw ConfigError("backreferences are not supported: " + expression_);
  }
  boost::regex::flag_type flags = boost::regex::perl;
  if (ignore_case) flags |= boost::regex::icase;
  try {
    impl_ = std::make_shared<const Impl>(Impl{boost::regex(expression_, flags)});
  } catch (const boost::regex_error& e) {
    throw ConfigError("invalid pattern '" + expression_ + "': " + e.what());
  }
}

bool Pattern::matches(std::string_view s) const {
  return boost::regex_match(s.begin(), s.end(), impl_->re);
}

bool Pattern::search(std::string_view s) const {
  return boost::regex_search(s.begin(), s.end(), impl_->re);
}

std::string Pattern::escape(std::string_view literal) {
  std::string out;
  out.reserve(literal.size() * 2);
  for (char c : literal) {
    switch (c) {
      case '.': case '^': case '$': case '|': case '(': case ')':
      case '[': case ']': case '{': case '}': case '*': case '+':
      case '?': case '\\':
        out.push_back('\\');
        break;
      default:
        break;
    }
    out.push_back(c);
  }
  return out;
}

}  // namespace logmorph
