#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace logmorph {

/// A single input line (or CSV row) that does not fit its format grammar.
/// Non-fatal during ingest: the line is tallied and routed to the rejects file.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, std::string reason)
      : std::runtime_error("line " + std::to_string(line) + ": " + reason),
        line_(line),
        reason_(std::move(reason)) {}

  std::size_t line() const noexcept { return line_; }
  const std::string& reason() const noexcept { return reason_; }

 private:
  std::size_t line_;
  std::string reason_;
};

/// Bad configuration detected before any record is processed
/// (missing CSV columns, invalid miner parameters, bad rule files).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Fatal I/O or format failure on a file as a whole.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid argument to a library operation.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace logmorph
