#include "logmorph_cli/cli.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>

namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = logmorph::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("logmorph_cli_" +
            std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    std::ofstream log(dir_ / "sys.log", std::ios::binary);
    for (int i = 0; i < 40; ++i) {
      const int sec = i % 60;
      log << "<14>Mar  4 10:" << (10 + i / 60) << ':' << (sec < 10 ? "0" : "")
          << sec << " node" << (i % 2) << " sshd[" << 100 + i
          << "]: session opened for user u" << i << '\n';
      log << "<14>Mar  4 10:" << (10 + i / 60) << ':' << (sec < 10 ? "0" : "")
          << sec << " node" << (i % 2) << " sshd[" << 200 + i
          << "]: session closed for user v" << i << '\n';
    }
    log << "not a syslog line\n";
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

}  // namespace

TEST(Cli, NoArgumentsIsUsageError) {
  const auto r = run({});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("Usage"), std::string::npos);
}

TEST(Cli, UnknownSubcommandAndFlag) {
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({"pairs", "--no-such-flag"}).code, 2);
}

TEST(Cli, HelpAndVersion) {
  EXPECT_EQ(run({"--help"}).code, 0);
  const auto v = run({"--version"});
  EXPECT_EQ(v.code, 0);
  EXPECT_NE(v.out.find("logmorph"), std::string::npos);
}

TEST_F(CliTest, IngestNeedsYearForSyslog) {
  const auto r = run({"ingest", path("sys.log"), "--out", dir_.string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("--year"), std::string::npos);
}

TEST_F(CliTest, FatalErrorIsOneLine) {
  const auto r = run({"templates", "--store", path("missing.ndjson"), "--out",
                      dir_.string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(std::count(r.err.begin(), r.err.end(), '\n'), 1);
}

TEST_F(CliTest, PipelineIsDeterministic) {
  const std::string out = dir_.string();
  auto r = run({"ingest", path("sys.log"), "--year", "2011", "--out", out});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("80 events, 1 rejected"), std::string::npos) << r.out;
  EXPECT_NE(slurp(dir_ / "rejects.tsv").find("not a syslog line"), std::string::npos);
  const std::string store = path("store.ndjson");

  const std::vector<std::vector<std::string>> commands{
      {"templates", "--store", store, "--mask", "timestamp,pid", "--refine"},
      {"classify", "--store", store, "--rules", LOGMORPH_DATA_DIR "/sendmail.rules"},
      {"words", "--store", store},
      {"phrases", "--store", store, "--phrase", "session opened"},
      {"pairs", "--store", store, "--mode", "template", "--min-confidence", "1.0"},
      {"ngrams", "--store", store, "--mode", "template"},
      {"profile", "--store", store, "--mode", "template"},
  };
  const std::vector<std::string> files{
      "templates.tsv", "assignments.csv", "refinement.csv", "classes.csv",
      "categories.csv", "severity_by_category.csv", "words.csv", "keywords.csv",
      "negations.csv", "phrases.csv", "pairs.csv", "ngrams.csv", "profile.json"};

  std::map<std::string, std::string> first;
  for (int pass = 0; pass < 2; ++pass) {
    for (auto args : commands) {
      args.push_back("--out");
      args.push_back(out);
      r = run(args);
      ASSERT_EQ(r.code, 0) << args[0] << ": " << r.err;
    }
    for (const auto& f : files) {
      const std::string content = slurp(dir_ / f);
      ASSERT_FALSE(content.empty()) << f;
      if (pass == 0) {
        first[f] = content;
      } else {
        EXPECT_EQ(first[f], content) << f;
      }
    }
  }
  // Every report carries the provenance header.
  for (const auto& f : files) {
    const std::string content = first[f];
    EXPECT_NE(content.find("input"), std::string::npos) << f;
    EXPECT_NE(content.find("0.3.0"), std::string::npos) << f;
  }
}

TEST_F(CliTest, TemplatesReductionLine) {
  const std::string out = dir_.string();
  ASSERT_EQ(run({"ingest", path("sys.log"), "--year", "2011", "--out", out}).code, 0);
  const auto r = run({"templates", "--store", path("store.ndjson"), "--mask",
                      "timestamp,pid", "--out", out});
  ASSERT_EQ(r.code, 0) << r.err;
  // pids live in the tag, not the message, so masking changes nothing here
  EXPECT_NE(r.out.find("unique messages: 80 → 80 after masking"), std::string::npos)
      << r.out;
  const std::string catalog = slurp(dir_ / "templates.tsv");
  EXPECT_NE(catalog.find("session opened for user (...)"), std::string::npos);
  EXPECT_NE(catalog.find("# outliers\t0"), std::string::npos);
}

TEST_F(CliTest, DeterministicPairsOnly) {
  const std::string out = dir_.string();
  std::ofstream csv(dir_ / "win.csv");
  csv << "Level,Date and Time,Source,Event ID,Message\n";
  const char* ids[] = {"900", "1066", "902", "1003", "900", "1066", "902", "7"};
  for (int i = 0; i < 8; ++i) {
    csv << "Information,2012-01-10 08:00:0" << i << ",S," << ids[i] << ",m\n";
  }
  csv.close();
  ASSERT_EQ(run({"ingest", path("win.csv"), "--format", "wincsv", "--store",
                 path("w.ndjson"), "--out", out})
                .code,
            0);
  const auto r = run({"pairs", "--store", path("w.ndjson"), "--min-confidence",
                      "1.0", "--out", out});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string pairs = slurp(dir_ / "pairs.csv");
  EXPECT_NE(pairs.find("S:900,S:1066,2,2,1.0000"), std::string::npos) << pairs;
  EXPECT_NE(pairs.find("S:1066,S:902,2,2,1.0000"), std::string::npos) << pairs;
  EXPECT_EQ(pairs.find("\nS:902,"), std::string::npos) << pairs;  // c = 0.5
}

TEST_F(CliTest, EnvironmentOutputDirectory) {
  const fs::path env_dir = dir_ / "envout";
  ::setenv("LOGMORPH_OUT", env_dir.string().c_str(), 1);
  const auto r = run({"ingest", path("sys.log"), "--year", "2011"});
  ::unsetenv("LOGMORPH_OUT");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(env_dir / "store.ndjson"));
}

TEST_F(CliTest, NdjsonReports) {
  const std::string out = dir_.string();
  ASSERT_EQ(run({"ingest", path("sys.log"), "--year", "2011", "--out", out}).code, 0);
  ASSERT_EQ(run({"words", "--store", path("store.ndjson"), "--format-out", "ndjson",
                 "--out", out, "--top", "3"})
                .code,
            0);
  std::istringstream lines(slurp(dir_ / "words.ndjson"));
  std::string line;
  std::getline(lines, line);
  EXPECT_EQ(line.rfind("{\"header\":", 0), 0u);
  int rows = 0;
  while (std::getline(lines, line)) {
    EXPECT_EQ(line.rfind("{\"word\":", 0), 0u) << line;
    ++rows;
  }
  EXPECT_EQ(rows, 3);
}
