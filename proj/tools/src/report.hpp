#pragma once

#include <json.hpp>

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace logmorph::cli {

using Json = nlohmann::ordered_json;

/// Incremental SHA-256, hex output.
class Sha256 {
 public:
  Sha256();
  ~Sha256();
  Sha256(const Sha256&) = delete;
  Sha256& operator=(const Sha256&) = delete;

  void update(std::string_view bytes);
  std::string hex();

 private:
  void* ctx_;
};

std::string sha256_hex(std::string_view bytes);

enum class OutputFormat { Csv, Ndjson };

/// Provenance block written at the top of every report.
struct ReportHeader {
  std::string command;
  std::vector<std::pair<std::string, std::string>> config;
  std::string input_digest;

  void set(std::string key, std::string value) {
    config.emplace_back(std::move(key), std::move(value));
  }
  Json to_json() const;
  /// "# key: value" lines.
  std::string comment_block() const;
};

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Json>> rows;
};

/// Writes `<dir>/<stem>.csv` or `<dir>/<stem>.ndjson`; returns the path.
std::filesystem::path write_table(const std::filesystem::path& dir,
                                  std::string_view stem,
                                  const ReportHeader& header,
                                  const Table& table, OutputFormat format);

/// Writes bytes, creating parent directories. Throws IoError.
void write_file(const std::filesystem::path& path, std::string_view bytes);
std::string read_file(const std::filesystem::path& path);

}  // namespace logmorph::cli
