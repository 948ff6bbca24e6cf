#include "report.hpp"

#include "logmorph/error.hpp"
#include "logmorph/text.hpp"
#include "logmorph/version.hpp"

#include <openssl/evp.h>

#include <fstream>
#include <iterator>
#include <sstream>

namespace logmorph::cli {

Sha256::Sha256() : ctx_(EVP_MD_CTX_new()) {
  auto* ctx = static_cast<EVP_MD_CTX*>(ctx_);
  if (ctx == nullptr || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
    EVP_MD_CTX_free(ctx);
    throw std::runtime_error("sha256 unavailable");
  }
}

Sha256::~Sha256() { EVP_MD_CTX_free(static_cast<EVP_MD_CTX*>(ctx_)); }

void Sha256::update(std::string_view bytes) {
  EVP_DigestUpdate(static_cast<EVP_MD_CTX*>(ctx_), bytes.data(), bytes.size());
}

std::string Sha256::hex() {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(static_cast<EVP_MD_CTX*>(ctx_), digest, &len);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xF]);
  }
  return out;
}

std::string sha256_hex(std::string_view bytes) {
  Sha256 h;
  h.update(bytes);
  return h.hex();
}

Json ReportHeader::to_json() const {
  Json cfg = Json::object();
  for (const auto& [k, v] : config) cfg[k] = v;
  Json j = Json::object();
  j["tool"] = "logmorph";
  j["version"] = std::string(version());
  j["command"] = command;
  j["config"] = std::move(cfg);
  j["input_sha256"] = input_digest;
  return j;
}

std::string ReportHeader::comment_block() const {
  std::ostringstream os;
  os << "# logmorph " << version() << '\n';
  os << "# command: " << command << '\n';
  for (const auto& [k, v] : config) os << "# " << k << ": " << v << '\n';
  os << "# input-sha256: " << input_digest << '\n';
  return os.str();
}

namespace {

std::string csv_cell(const Json& v) {
  if (v.is_string()) return text::csv_escape(v.get_ref<const std::string&>());
  if (v.is_null()) return {};
  return v.dump();
}

}  // namespace

std::filesystem::path write_table(const std::filesystem::path& dir,
                                  std::string_view stem,
                                  const ReportHeader& header,
                                  const Table& table, OutputFormat format) {
  std::ostringstream os;
  std::filesystem::path path = dir;
  if (format == OutputFormat::Csv) {
    path /= std::string(stem) + ".csv";
    os << header.comment_block();
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
      if (i) os << ',';
      os << text::csv_escape(table.columns[i]);
    }
    os << '\n';
    for (const auto& row : table.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) os << ',';
        os << csv_cell(row[i]);
      }
      os << '\n';
    }
  } else {
    path /= std::string(stem) + ".ndjson";
    Json head = Json::object();
    head["header"] = header.to_json();
    os << head.dump() << '\n';
    for (const auto& row : table.rows) {
      Json obj = Json::object();
      for (std::size_t i = 0; i < row.size() && i < table.columns.size();
           ++i) {
        obj[table.columns[i]] = row[i];
      }
      os << obj.dump(-1, ' ', false, Json::error_handler_t::replace) << '\n';
    }
  }
  write_file(path, os.str());
  return path;
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) {
      throw IoError("cannot create directory " + path.parent_path().string() +
                    ": " + ec.message());
    }
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace logmorph::cli
