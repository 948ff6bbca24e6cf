// One PASS/FAIL line per criterion; exit status 1 when any criterion fails.

#include "logmorph/ingest.hpp"
#include "logmorph/rules.hpp"
#include "logmorph/sequences.hpp"
#include "logmorph/store.hpp"
#include "logmorph/templates.hpp"
#include "logmorph/text_stats.hpp"
#include "logmorph_cli/cli.hpp"

#include "oracles.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace logmorph;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

Outcome ok(bool pass, std::string detail) { return {pass, std::move(detail)}; }

// 1 --------------------------------------------------------------------------
Outcome template_recovery() {
  const auto corpus = oracle::labeled_corpus(10'000, 1);
  const auto t0 = std::chrono::steady_clock::now();
  const TemplateCatalog cat = mine_templates(corpus.events, MinerConfig{});
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  std::map<TemplateId, std::set<std::size_t>> labels_of;
  std::map<std::size_t, std::set<TemplateId>> ids_of;
  std::size_t assigned = 0;
  for (const auto& [seq, id] : cat.assignments) {
    const std::size_t label = corpus.labels[seq - 1];
    if (id == kOutlierId) continue;
    labels_of[id].insert(label);
    ids_of[label].insert(id);
    ++assigned;
  }
  bool bijective = labels_of.size() == 12 && ids_of.size() == 12;
  for (const auto& [id, ls] : labels_of) bijective = bijective && ls.size() == 1;
  for (const auto& [l, is] : ids_of) bijective = bijective && is.size() == 1;

  char buf[160];
  std::snprintf(buf, sizeof buf, "templates=%zu assigned=%zu/%zu outliers=%zu %.3fs",
                cat.templates.size(), assigned, corpus.events.size(), cat.outliers,
                secs);
  return ok(cat.templates.size() == 12 && assigned == corpus.events.size() &&
                bijective && secs < 5.0,
            buf);
}

// 2 --------------------------------------------------------------------------
Outcome masking_reduction() {
  const auto corpus = oracle::masking_corpus(500, 2, 2);
  std::vector<EventRecord> events;
  for (const auto& m : corpus.messages) events.push_back(oracle::event(m));
  events = oracle::number(events);

  std::set<std::string> raw(corpus.messages.begin(), corpus.messages.end());
  std::set<std::string> substituted;
  for (std::size_t i = 0; i < corpus.messages.size(); ++i) {
    substituted.insert(oracle::substitute(corpus.messages[i], corpus.planted[i]));
  }
  const std::vector<MaskKind> kinds{MaskKind::Timestamp, MaskKind::Pid};
  const auto stages = builtin_stages(kinds);
  const std::size_t unmasked = unique_skeleton_count(events, {});
  const std::size_t masked = unique_skeleton_count(events, stages);
  return ok(unmasked == raw.size() && raw.size() == 1000 &&
                masked == substituted.size() && masked == 500,
            "unmasked=" + std::to_string(unmasked) + " masked=" + std::to_string(masked) +
                " oracle=" + std::to_string(raw.size()) + "/" +
                std::to_string(substituted.size()));
}

// 3 --------------------------------------------------------------------------
Outcome pair_confidence() {
  oracle::Rng rng(3);
  const std::vector<std::string> alphabet{"A", "B", "C"};
  const int cases = 2000;
  int failures = 0;
  for (int round = 0; round < cases; ++round) {
    std::vector<std::vector<std::string>> streams(1);
    const std::size_t len = oracle::uniform(rng, 0, 20);
    for (std::size_t i = 0; i < len; ++i) {
      streams[0].push_back(alphabet[oracle::uniform(rng, 0, 2)]);
    }
    const auto pairs = mine_pairs(KeyStreams::from_text(streams));
    const auto truth = oracle::enumerate_pairs(streams);
    bool good = pairs.size() == truth.pair_count.size();
    std::map<std::string, Ratio> sum;
    for (const auto& p : pairs) {
      const auto it = truth.pair_count.find({p.antecedent, p.successor});
      good = good && it != truth.pair_count.end() && it->second == p.pair_count &&
             truth.antecedent_total.at(p.antecedent) == p.antecedent_total;
      sum[p.antecedent] += p.confidence();
    }
    for (const auto& [a, s] : sum) good = good && s == Ratio(1);
    good = good && sum.size() == truth.antecedent_total.size();
    if (!good) ++failures;
  }
  return ok(failures == 0, std::to_string(cases) + " streams, " +
                               std::to_string(failures) + " mismatches");
}

// 4 --------------------------------------------------------------------------
Outcome sequence_fixture() {
  oracle::Rng rng(4);
  const std::vector<std::uint64_t> motif{900, 1066, 902, 1003};
  const std::vector<std::uint64_t> noise_ids{1066, 902, 1003, 4624, 4634, 7036, 6005, 6006};
  std::vector<std::uint64_t> noise;
  for (int i = 0; i < 9000; ++i) {
    noise.push_back(noise_ids[oracle::uniform(rng, 0, noise_ids.size() - 1)]);
  }
  // 300 distinct insertion points, applied back to front.
  std::set<std::size_t> points;
  while (points.size() < 300) points.insert(oracle::uniform(rng, 0, noise.size()));
  for (auto it = points.rbegin(); it != points.rend(); ++it) {
    noise.insert(noise.begin() + static_cast<long>(*it), motif.begin(), motif.end());
  }
  std::vector<EventRecord> events;
  for (std::size_t i = 0; i < noise.size(); ++i) {
    auto e = oracle::event("m", static_cast<std::int64_t>(i), "ws1");
    e.event_id = noise[i];
    events.push_back(std::move(e));
  }
  events = oracle::number(events);
  const auto streams = build_streams(events, KeyMode::Id, Scope::Host);
  const auto grams = mine_ngrams(streams, 4, 100);
  const std::vector<std::string> want{"900", "1066", "902", "1003"};
  std::size_t count = 0;
  for (const auto& g : grams) {
    if (g.keys == want) count = g.count;
  }
  return ok(count == 300, "4-gram <900,1066,902,1003> count=" + std::to_string(count) +
                              " in " + std::to_string(events.size()) + " events");
}

// 5 --------------------------------------------------------------------------
Outcome ruleset_fixture() {
  const RuleSet r = load_rules(LOGMORPH_DATA_DIR "/sendmail.rules");
  const auto t = r.category_tally();
  const auto at = [&](Category c) { return t[static_cast<std::size_t>(c)]; };
  const bool tally = at(Category::Info) == 26 && at(Category::Notice) == 18 &&
                     at(Category::Debug) == 2 && at(Category::Alert) == 2 &&
                     at(Category::Warning) == 1 && at(Category::Critical) == 4 &&
                     at(Category::Security) == 1 && at(Category::Error) == 0 &&
                     at(Category::Emergency) == 0;
  std::string detail = "info=" + std::to_string(at(Category::Info)) +
                       " notice=" + std::to_string(at(Category::Notice)) +
                       " debug=" + std::to_string(at(Category::Debug)) +
                       " alert=" + std::to_string(at(Category::Alert)) +
                       " warning=" + std::to_string(at(Category::Warning)) +
                       " critical=" + std::to_string(at(Category::Critical)) +
                       " security=" + std::to_string(at(Category::Security)) +
                       "; rules=" + std::to_string(r.size()) +
                       " (the stated composition sums to 54, not 53)";
  return ok(tally && r.size() == 54, detail);
}

// 6 --------------------------------------------------------------------------
Outcome priority_decoding() {
  int bad = 0;
  for (int pri = 0; pri <= 191; ++pri) {
    const Priority p = decode_priority(pri);
    const int sev = static_cast<int>(p.severity);
    if (8 * p.facility + sev != pri || p.facility < 0 || p.facility > 23 || sev < 0 ||
        sev > 7) {
      ++bad;
    }
  }
  bool range_rejected = true;
  for (int pri : {-1, 192, 1000}) {
    try {
      decode_priority(pri);
      range_rejected = false;
    } catch (const std::exception&) {
    }
  }
  return ok(bad == 0 && range_rejected,
            "192 values, " + std::to_string(bad) + " mismatches");
}

// 7 --------------------------------------------------------------------------
std::string filler_word(oracle::Rng& rng) {
  // letters that cannot spell any planted phrase
  static constexpr char kLetters[] = "cdfghjkmpqrsvwxyz";
  std::string w;
  const std::size_t len = oracle::uniform(rng, 2, 8);
  for (std::size_t i = 0; i < len; ++i) {
    w.push_back(kLetters[oracle::uniform(rng, 0, sizeof kLetters - 2)]);
  }
  if (oracle::uniform(rng, 0, 9) == 0) w[0] = static_cast<char>(w[0] - 'a' + 'A');
  if (oracle::uniform(rng, 0, 9) == 0) w += ",";
  return w;
}

Outcome word_phrase_stats() {
  oracle::Rng rng(7);
  const std::vector<std::string> planted_forms{"not able", "Not able",
                                               "no user action is required",
                                               "No user action is required"};
  std::vector<std::string> messages;
  std::set<std::tuple<std::string, std::uint64_t, std::size_t>> planted;
  for (std::uint64_t seq = 1; seq <= 1000; ++seq) {
    std::string m;
    const std::size_t words = oracle::uniform(rng, 1, 12);
    for (std::size_t i = 0; i < words; ++i) {
      if (!m.empty()) m += ' ';
      if (oracle::uniform(rng, 0, 7) == 0) {
        const std::string& form = planted_forms[oracle::uniform(rng, 0, 3)];
        const std::string canonical =
            form.size() == 8 ? "not able" : "no user action is required";
        planted.insert({canonical, seq, m.size()});
        m += form;
      } else {
        m += filler_word(rng);
      }
    }
    messages.push_back(m);
  }
  std::vector<EventRecord> events;
  for (const auto& m : messages) events.push_back(oracle::event(m));
  events = oracle::number(events);

  const WordTable table = word_frequencies(events);
  const auto truth = oracle::count_words(messages);
  std::size_t truth_total = 0;
  for (const auto& [w, c] : truth) truth_total += c;
  const bool words_ok = table.counts == truth && table.total == truth_total;

  const std::vector<std::string> phrases{"not able", "no user action is required"};
  std::set<std::tuple<std::string, std::uint64_t, std::size_t>> found;
  bool lengths_ok = true;
  for (const auto& h : find_phrases(events, phrases)) {
    found.insert({h.phrase, h.seq, h.offset});
    lengths_ok = lengths_ok && h.length == h.phrase.size();
  }
  return ok(words_ok && lengths_ok && found == planted,
            "words=" + std::to_string(table.total) + "/" +
                std::to_string(truth_total) + " distinct=" +
                std::to_string(table.distinct()) + " phrase hits=" +
                std::to_string(found.size()) + "/" + std::to_string(planted.size()));
}

// 8 --------------------------------------------------------------------------
std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

int cli(std::vector<std::string> args, std::string* out = nullptr) {
  std::ostringstream o, e;
  const int code = cli::run(args, o, e);
  if (out) *out = o.str();
  if (code != 0) std::cerr << "cli " << args[0] << ": " << e.str();
  return code;
}

Outcome determinism_and_conservation() {
  const fs::path dir = fs::temp_directory_path() / "logmorph_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);
  {
    const auto corpus = oracle::labeled_corpus(3000, 8);
    std::ofstream log(dir / "mixed.log", std::ios::binary);
    oracle::Rng rng(8);
    for (std::size_t i = 0; i < corpus.events.size(); ++i) {
      char stamp[32];
      std::snprintf(stamp, sizeof stamp, "Mar %2zu %02zu:%02zu:%02zu", 1 + i / 1000,
                    (i / 3600) % 24, (i / 60) % 60, i % 60);
      log << '<' << oracle::uniform(rng, 0, 191) << '>' << stamp << " node"
          << oracle::uniform(rng, 0, 3) << " app[" << oracle::uniform(rng, 100, 999)
          << "]: " << corpus.events[i].message << '\n';
    }
    log << "stat=Sent (queued)\n";  // rejected: no header
  }
  const std::string out = dir.string();
  const std::string store = (dir / "store.ndjson").string();
  std::string stdout_text;
  if (cli({"ingest", (dir / "mixed.log").string(), "--year", "2012", "--out", out}) != 0) {
    return ok(false, "ingest failed");
  }
  const std::vector<std::vector<std::string>> commands{
      {"templates", "--store", store, "--refine"},
      {"classify", "--store", store, "--rules", LOGMORPH_DATA_DIR "/sendmail.rules"},
      {"words", "--store", store},
      {"phrases", "--store", store},
      {"pairs", "--store", store, "--mode", "template"},
      {"ngrams", "--store", store, "--mode", "template"},
      {"profile", "--store", store, "--mode", "template"},
  };
  const std::vector<std::string> files{
      "templates.tsv", "assignments.csv", "refinement.csv", "classes.csv",
      "categories.csv", "severity_by_category.csv", "words.csv", "keywords.csv",
      "negations.csv", "phrases.csv", "pairs.csv", "ngrams.csv", "profile.json"};
  std::map<std::string, std::string> first;
  std::size_t differing = 0;
  for (int pass = 0; pass < 2; ++pass) {
    for (auto args : commands) {
      args.insert(args.end(), {"--out", out});
      if (cli(args) != 0) return ok(false, args[0] + " failed");
    }
    for (const auto& f : files) {
      const std::string content = slurp(dir / f);
      if (pass == 0) {
        first[f] = content;
      } else if (content != first[f] || content.empty()) {
        ++differing;
      }
    }
  }

  const EventStore s = read_store(dir / "store.ndjson");
  const auto events = s.events();
  const TemplateCatalog cat = mine_templates(events, MinerConfig{});
  const bool templates_conserve = cat.total_support() + cat.outliers == s.size();
  const ClassTally tally =
      classify_all(events, load_rules(LOGMORPH_DATA_DIR "/sendmail.rules"));
  std::size_t class_sum = tally.unmatched;
  for (auto c : tally.per_class) class_sum += c;
  const bool classes_conserve = class_sum == s.size();

  // refinement.csv: the last column of each data row
  std::vector<long> curve;
  std::istringstream lines(first["refinement.csv"]);
  std::string line;
  bool header_seen = false;
  while (std::getline(lines, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    curve.push_back(std::stol(line.substr(line.rfind(',') + 1)));
  }
  bool non_increasing = curve.size() == 3;
  for (std::size_t i = 1; i < curve.size(); ++i) {
    non_increasing = non_increasing && curve[i] <= curve[i - 1];
  }
  std::string curve_text;
  for (auto c : curve) curve_text += (curve_text.empty() ? "" : ">=") + std::to_string(c);
  fs::remove_all(dir);
  return ok(differing == 0 && templates_conserve && classes_conserve && non_increasing,
            std::to_string(files.size()) + " reports, " + std::to_string(differing) +
                " differ; N=" + std::to_string(s.size()) + " supports+outliers=" +
                std::to_string(cat.total_support() + cat.outliers) +
                " classes+unmatched=" + std::to_string(class_sum) +
                " refinement=" + curve_text);
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"template-recovery", template_recovery},
      {"masking-reduction", masking_reduction},
      {"pair-confidence", pair_confidence},
      {"sequence-fixture", sequence_fixture},
      {"ruleset-fixture", ruleset_fixture},
      {"priority-decoding", priority_decoding},
      {"word-phrase-stats", word_phrase_stats},
      {"determinism-conservation", determinism_and_conservation},
  };
  int failed = 0;
  int n = 0;
  for (const auto& [name, check] : criteria) {
    ++n;
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::cout << (o.pass ? "PASS" : "FAIL") << ' ' << n << ' ' << name << ": "
              << o.detail << '\n';
    if (!o.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
