#include "logmorph_cli/cli.hpp"

#include "report.hpp"

#include "logmorph/error.hpp"
#include "logmorph/ingest.hpp"
#include "logmorph/rules.hpp"
#include "logmorph/sequences.hpp"
#include "logmorph/store.hpp"
#include "logmorph/templates.hpp"
#include "logmorph/text.hpp"
#include "logmorph/text_stats.hpp"
#include "logmorph/version.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <functional>
#include <iomanip>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

namespace logmorph::cli {

namespace fs = std::filesystem;

namespace {

/// Bad flag values found after parsing; reported like parse errors (exit 2).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string store;
  std::string out_dir;
  std::string format_out = "csv";
  std::string host;
  std::string source;
  std::string id_range;
  std::string severity_range;
  std::string since;
  std::string until;
};

struct MinerFlags {
  std::string mask = "timestamp,pid";
  std::size_t support = 0;  // 0 = automatic
  double type_threshold = 0.9;
  double merge_distance = 0.0;
};

struct SequenceFlags {
  std::string mode = "id";
  std::string scope = "host";
  std::string rules;
};

struct Loaded {
  EventStore store;
  std::string digest;
};

std::string format_double(double v) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(4) << v;
  return os.str();
}

fs::path output_dir(const Common& c) {
  if (!c.out_dir.empty()) return c.out_dir;
  if (const char* env = std::getenv("LOGMORPH_OUT"); env && *env) return env;
  return ".";
}

OutputFormat output_format(const Common& c) {
  if (c.format_out == "csv") return OutputFormat::Csv;
  if (c.format_out == "ndjson") return OutputFormat::Ndjson;
  throw UsageError("--format-out must be csv or ndjson");
}

template <class Int>
Int parse_uint(std::string_view s, std::string_view what) {
  Int v{};
  const auto t = text::trim(s);
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc{} || ptr != t.data() + t.size()) {
    throw UsageError("bad " + std::string(what) + " '" + std::string(s) + "'");
  }
  return v;
}

std::pair<std::string_view, std::string_view> split_range(std::string_view s) {
  const auto dash = s.find('-', 1);
  if (dash == std::string_view::npos) return {s, s};
  return {s.substr(0, dash), s.substr(dash + 1)};
}

Severity severity_flag(std::string_view s) {
  const auto sev = parse_severity(text::trim(s));
  if (!sev) throw UsageError("bad severity '" + std::string(s) + "'");
  return *sev;
}

Timestamp time_flag(std::string_view s, std::string_view what) {
  const auto t = parse_iso_timestamp(text::trim(s));
  if (!t) {
    throw UsageError("bad " + std::string(what) + " timestamp '" +
                     std::string(s) + "'");
  }
  return *t;
}

EventFilter build_filter(const Common& c) {
  EventFilter f;
  if (!c.host.empty()) f.host = text::to_lower_ascii(c.host);
  if (!c.source.empty()) f.source = c.source;
  if (!c.id_range.empty()) {
    const auto [lo, hi] = split_range(c.id_range);
    f.event_id = Range<std::uint64_t>{parse_uint<std::uint64_t>(lo, "--id"),
                                      parse_uint<std::uint64_t>(hi, "--id")};
  }
  if (!c.severity_range.empty()) {
    const auto [lo, hi] = split_range(c.severity_range);
    f.severity = Range<Severity>{severity_flag(lo), severity_flag(hi)};
  }
  if (!c.since.empty()) f.since = time_flag(c.since, "--since");
  if (!c.until.empty()) f.until = time_flag(c.until, "--until");
  return f;
}

Loaded load_store(const Common& c) {
  if (c.store.empty()) throw UsageError("--store is required");
  const std::string bytes = read_file(c.store);
  std::istringstream in(bytes);
  EventStore store = read_store(in, c.store);
  const EventFilter filter = build_filter(c);
  if (!filter.unconstrained()) store = filtered(store, filter);
  return {std::move(store), sha256_hex(bytes)};
}

void echo_common(ReportHeader& h, const Common& c) {
  h.set("store", c.store);
  if (!c.host.empty()) h.set("filter-host", c.host);
  if (!c.source.empty()) h.set("filter-source", c.source);
  if (!c.id_range.empty()) h.set("filter-id", c.id_range);
  if (!c.severity_range.empty()) h.set("filter-severity", c.severity_range);
  if (!c.since.empty()) h.set("filter-since", c.since);
  if (!c.until.empty()) h.set("filter-until", c.until);
}

struct LoadedRules {
  RuleSet rules;
  std::string digest;
};

LoadedRules load_rule_file(const std::string& path) {
  const std::string bytes = read_file(path);
  std::istringstream in(bytes);
  return {parse_rules(in, path), sha256_hex(bytes)};
}

std::vector<MaskKind> parse_mask_list(std::string_view list) {
  std::vector<MaskKind> kinds;
  const std::string lower = text::to_lower_ascii(text::trim(list));
  if (lower.empty() || lower == "none") return kinds;
  std::size_t pos = 0;
  while (pos <= lower.size()) {
    const auto comma = std::min(lower.find(',', pos), lower.size());
    const auto name = text::trim(std::string_view(lower).substr(pos, comma - pos));
    const auto kind = parse_mask_kind(name);
    if (!kind) throw UsageError("unknown mask stage '" + std::string(name) + "'");
    if (std::find(kinds.begin(), kinds.end(), *kind) == kinds.end()) {
      kinds.push_back(*kind);
    }
    pos = comma + 1;
  }
  return kinds;
}

std::string mask_list_text(std::span<const MaskKind> kinds) {
  if (kinds.empty()) return "none";
  std::string s;
  for (const auto k : kinds) {
    if (!s.empty()) s += ',';
    s += to_string(k);
  }
  return s;
}

std::vector<MaskStage> make_stages(std::span<const MaskKind> kinds,
                                   const EventStore& store) {
  std::vector<MaskStage> stages;
  std::vector<std::string> hosts;
  for (const auto k : kinds) {
    if (k != MaskKind::Host) {
      stages.push_back(builtin_stage(k));
      continue;
    }
    if (hosts.empty()) {
      std::set<std::string> distinct;
      for (const auto& e : store.events()) distinct.insert(e.host);
      hosts.assign(distinct.begin(), distinct.end());
    }
    stages.push_back(hosts.empty() ? builtin_stage(k) : host_stage(hosts));
  }
  return stages;
}

MinerConfig miner_config(const MinerFlags& m, std::span<const MaskKind> kinds,
                         const EventStore& store) {
  MinerConfig cfg;
  if (m.support != 0) cfg.support = m.support;
  cfg.type_threshold = m.type_threshold;
  cfg.merge_distance = m.merge_distance;
  cfg.stages = make_stages(kinds, store);
  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    throw UsageError(e.what());
  }
  return cfg;
}

void echo_miner(ReportHeader& h, const MinerFlags& m,
                std::span<const MaskKind> kinds, std::size_t support) {
  h.set("mask", mask_list_text(kinds));
  h.set("support", m.support == 0 ? "auto(" + std::to_string(support) + ")"
                                  : std::to_string(support));
  h.set("type-threshold", format_double(m.type_threshold));
  h.set("merge-distance",
        m.merge_distance > 0 ? format_double(m.merge_distance) : "off");
}

void add_common(CLI::App* sub, Common& c, bool filters = true) {
  sub->add_option("--store", c.store, "Event store (NDJSON)");
  sub->add_option("--out", c.out_dir,
                  "Output directory (default: $LOGMORPH_OUT or .)");
  sub->add_option("--format-out", c.format_out, "Report format: csv or ndjson")
      ->check(CLI::IsMember({"csv", "ndjson"}));
  if (!filters) return;
  sub->add_option("--host", c.host, "Only events from this host");
  sub->add_option("--source", c.source, "Only events with this source");
  sub->add_option("--id", c.id_range, "Event id or range lo-hi");
  sub->add_option("--severity", c.severity_range,
                  "Severity or range lo-hi (names or codes)");
  sub->add_option("--since", c.since, "Earliest timestamp (ISO-8601)");
  sub->add_option("--until", c.until, "Latest timestamp (ISO-8601)");
}

void add_miner(CLI::App* sub, MinerFlags& m) {
  sub->add_option("--mask", m.mask,
                  "Mask stages: timestamp,pid,host,ip,number,hex or none")
      ->capture_default_str();
  sub->add_option("--support", m.support,
                  "Absolute support threshold (default max(2, ceil(N/1000)))");
  sub->add_option("--type-threshold", m.type_threshold,
                  "Variable typing threshold in (0,1]")
      ->capture_default_str();
  sub->add_option("--merge-distance", m.merge_distance,
                  "Merge templates within this distance (0 = no merge)")
      ->capture_default_str();
}

void add_sequence(CLI::App* sub, SequenceFlags& s) {
  sub->add_option("--mode", s.mode, "Event key: id, template or class")
      ->check(CLI::IsMember({"id", "template", "class"}))
      ->capture_default_str();
  sub->add_option("--scope", s.scope, "Stream partition: global, host, host/source")
      ->check(CLI::IsMember({"global", "host", "host/source", "host-source"}))
      ->capture_default_str();
  sub->add_option("--rules", s.rules, "Rule file (class mode)");
}

// ---------------------------------------------------------------- commands

class Runner {
 public:
  explicit Runner(std::ostream& out) : out_(out) {}

  int ingest(const std::vector<std::string>& inputs, const std::string& format,
             int year, bool year_given, const std::string& tz,
             const std::string& default_host, const Common& c);
  int classify(const Common& c, const std::string& rules_path);
  int templates(const Common& c, const MinerFlags& m, bool refine);
  int words(const Common& c, const std::string& rules_path, std::size_t top);
  int phrases(const Common& c, std::vector<std::string> phrases);
  int pairs(const Common& c, const SequenceFlags& s, const MinerFlags& m,
            const std::string& min_confidence, std::size_t min_support);
  int ngrams(const Common& c, const SequenceFlags& s, const MinerFlags& m,
             std::size_t n_max, std::size_t min_support);
  int profile(const Common& c, const SequenceFlags& s, const MinerFlags& m,
              std::size_t n_max, std::size_t min_support,
              const ProfileOptions& opts);

 private:
  struct Streams {
    KeyStreams streams;
    std::optional<LoadedRules> rules;
  };
  Streams streams_for(const Loaded& data, const SequenceFlags& s,
                      const MinerFlags& m, ReportHeader& h);

  std::ostream& out_;
};

std::chrono::minutes parse_tz(std::string_view s) {
  const auto t = text::trim(s);
  if (t.empty() || t == "Z" || t == "z" || t == "UTC") return {};
  const bool neg = t.front() == '-';
  const auto body = (t.front() == '+' || t.front() == '-') ? t.substr(1) : t;
  int minutes = 0;
  if (const auto colon = body.find(':'); colon != std::string_view::npos) {
    const int h = parse_uint<int>(body.substr(0, colon), "--tz");
    const int m = parse_uint<int>(body.substr(colon + 1), "--tz");
    if (m >= 60) throw UsageError("bad --tz '" + std::string(s) + "'");
    minutes = h * 60 + m;
  } else if (body.size() == 4) {
    minutes = parse_uint<int>(body.substr(0, 2), "--tz") * 60 +
              parse_uint<int>(body.substr(2), "--tz");
  } else {
    minutes = parse_uint<int>(body, "--tz") * 60;
  }
  if (minutes > 14 * 60) throw UsageError("bad --tz '" + std::string(s) + "'");
  return std::chrono::minutes(neg ? -minutes : minutes);
}

int Runner::ingest(const std::vector<std::string>& inputs,
                   const std::string& format, int year, bool year_given,
                   const std::string& tz, const std::string& default_host,
                   const Common& c) {
  const auto fmt = parse_input_format(format);
  if (!fmt) throw UsageError("unknown --format '" + format + "'");
  if ((*fmt == InputFormat::Syslog || *fmt == InputFormat::Sendmail) &&
      !year_given) {
    throw UsageError("--year is required for " + std::string(to_string(*fmt)) +
                     " input");
  }
  ParseOptions opts;
  if (year_given) opts.year = year;
  opts.utc_offset = parse_tz(tz);
  if (!default_host.empty()) opts.default_host = text::to_lower_ascii(default_host);

  std::vector<fs::path> paths(inputs.begin(), inputs.end());
  Sha256 digest;
  for (const auto& p : paths) {
    const std::string bytes = read_file(p);
    digest.update(p.filename().string());
    digest.update(std::string_view("\0", 1));
    digest.update(bytes);
  }

  EventStore store;
  const IngestSummary summary = ingest_files(paths, *fmt, opts, store);

  const fs::path dir = output_dir(c);
  const fs::path store_path =
      c.store.empty() ? dir / "store.ndjson" : fs::path(c.store);
  {
    std::ostringstream os;
    write_store(store, os);
    write_file(store_path, os.str());
  }
  {
    std::ostringstream os;
    write_rejects(summary.rejects, os);
    write_file(dir / "rejects.tsv", os.str());
  }

  ReportHeader h{"ingest", {}, digest.hex()};
  h.set("format", std::string(to_string(*fmt)));
  h.set("year", year_given ? std::to_string(year) : "n/a");
  h.set("tz", tz.empty() ? "+00:00" : tz);
  h.set("default-host", opts.default_host);
  h.set("store", store_path.generic_string());
  Table t{{"file", "accepted", "rejected"}, {}};
  for (const auto& f : summary.files) {
    t.rows.push_back({fs::path(f.path).filename().string(), f.accepted,
                      f.rejected});
  }
  t.rows.push_back({"total", summary.accepted, summary.rejected});
  write_table(dir, "ingest", h, t, output_format(c));

  out_ << "ingested " << summary.accepted << " events, " << summary.rejected
       << " rejected";
  if (summary.duplicate_keys) {
    out_ << ", " << summary.duplicate_keys << " duplicate keys";
  }
  out_ << " -> " << store_path.generic_string() << '\n';
  return 0;
}

int Runner::classify(const Common& c, const std::string& rules_path) {
  if (rules_path.empty()) throw UsageError("--rules is required");
  const Loaded data = load_store(c);
  const LoadedRules rules = load_rule_file(rules_path);
  const ClassTally tally = classify_all(data.store.events(), rules.rules);

  ReportHeader h{"classify", {}, data.digest};
  echo_common(h, c);
  h.set("rules", rules_path);
  h.set("rules-sha256", rules.digest);
  h.set("rule-count", std::to_string(rules.rules.size()));
  const fs::path dir = output_dir(c);
  const OutputFormat fmt = output_format(c);

  Table classes{{"class", "category", "count"}, {}};
  for (std::size_t i = 0; i < tally.class_names.size(); ++i) {
    classes.rows.push_back({tally.class_names[i],
                            std::string(to_string(tally.class_categories[i])),
                            tally.per_class[i]});
  }
  write_table(dir, "classes", h, classes, fmt);

  Table cats{{"category", "rules", "count"}, {}};
  const auto rule_tally = rules.rules.category_tally();
  for (std::size_t k = 0; k < kCategoryCount; ++k) {
    cats.rows.push_back({std::string(to_string(static_cast<Category>(k))),
                         rule_tally[k], tally.per_category[k]});
  }
  cats.rows.push_back({"unmatched", 0, tally.unmatched});
  write_table(dir, "categories", h, cats, fmt);

  Table cross{{"severity"}, {}};
  for (std::size_t k = 0; k < kCategoryCount; ++k) {
    cross.columns.emplace_back(to_string(static_cast<Category>(k)));
  }
  cross.columns.emplace_back("unmatched");
  for (std::size_t s = 0; s < kSeverityCount; ++s) {
    std::vector<Json> row{std::string(to_string(static_cast<Severity>(s)))};
    for (std::size_t k = 0; k < kCategoryCount; ++k) {
      row.emplace_back(tally.cross_tab[s][k]);
    }
    row.emplace_back(tally.unmatched_by_severity[s]);
    cross.rows.push_back(std::move(row));
  }
  write_table(dir, "severity_by_category", h, cross, fmt);

  out_ << "classified " << tally.total << " events: "
       << tally.total - tally.unmatched << " matched, " << tally.unmatched
       << " unmatched\n";
  return 0;
}

int Runner::templates(const Common& c, const MinerFlags& m, bool refine) {
  const Loaded data = load_store(c);
  const auto events = data.store.events();
  const auto kinds = parse_mask_list(m.mask);
  const MinerConfig cfg = miner_config(m, kinds, data.store);

  TemplateCatalog catalog = mine_templates(events, cfg);
  if (m.merge_distance > 0) catalog = merge_templates(catalog, m.merge_distance);
  catalog = type_variables(catalog, events, m.type_threshold);

  const std::size_t unmasked = unique_skeleton_count(events, {});
  const std::size_t masked = unique_skeleton_count(events, cfg.stages);

  ReportHeader h{"templates", {}, data.digest};
  echo_common(h, c);
  echo_miner(h, m, kinds, cfg.effective_support(events.size()));
  const fs::path dir = output_dir(c);
  const OutputFormat fmt = output_format(c);

  {
    std::ostringstream os;
    os << h.comment_block();
    write_catalog(catalog, os);
    write_file(dir / "templates.tsv", os.str());
  }
  Table assign{{"seq", "template"}, {}};
  for (const auto& [seq, id] : catalog.assignments) {
    assign.rows.push_back({seq, id});
  }
  write_table(dir, "assignments", h, assign, fmt);

  if (refine) {
    std::vector<MaskKind> base;
    for (const auto k : kinds) {
      if (k != MaskKind::Host) base.push_back(k);
    }
    std::vector<MaskKind> with_host = base;
    with_host.push_back(MaskKind::Host);
    const double d = m.merge_distance > 0 ? m.merge_distance
                                          : MinerConfig{}.merge_distance;

    Table curve{{"step", "mask", "merge_distance", "classes"}, {}};
    const auto run_step = [&](std::span<const MaskKind> ks) {
      MinerFlags mf = m;
      return mine_templates(events, miner_config(mf, ks, data.store));
    };
    const TemplateCatalog c1 = run_step(base);
    const TemplateCatalog c2 = run_step(with_host);
    const TemplateCatalog c3 = merge_templates(c2, d);
    curve.rows.push_back({1, mask_list_text(base), "off", class_count(c1, events)});
    curve.rows.push_back(
        {2, mask_list_text(with_host), "off", class_count(c2, events)});
    curve.rows.push_back(
        {3, mask_list_text(with_host), format_double(d), class_count(c3, events)});
    write_table(dir, "refinement", h, curve, fmt);
    out_ << "refinement:";
    for (const auto& row : curve.rows) out_ << ' ' << row[3].dump();
    out_ << '\n';
  }

  out_ << "unique messages: " << unmasked << " → " << masked
       << " after masking\n";
  out_ << "templates: " << catalog.templates.size()
       << ", outliers: " << catalog.outliers << '\n';
  return 0;
}

int Runner::words(const Common& c, const std::string& rules_path,
                  std::size_t top) {
  const Loaded data = load_store(c);
  const auto events = data.store.events();
  const WordTable table = word_frequencies(events);

  ReportHeader h{"words", {}, data.digest};
  echo_common(h, c);
  h.set("top", top == 0 ? "all" : std::to_string(top));
  std::optional<LoadedRules> rules;
  if (!rules_path.empty()) {
    rules = load_rule_file(rules_path);
    h.set("rules", rules_path);
    h.set("rules-sha256", rules->digest);
  }
  const fs::path dir = output_dir(c);
  const OutputFormat fmt = output_format(c);

  const auto limit = [&](std::size_t n) { return top == 0 ? n : std::min(n, top); };

  Table wt{{"word", "count"}, {}};
  const auto ranked = table.ranked();
  for (std::size_t i = 0; i < limit(ranked.size()); ++i) {
    wt.rows.push_back({ranked[i].word, ranked[i].count});
  }
  write_table(dir, "words", h, wt, fmt);

  Table nt{{"phrase", "count"}, {}};
  const auto neg = negation_scan(events).ranked();
  for (std::size_t i = 0; i < limit(neg.size()); ++i) {
    nt.rows.push_back({neg[i].word, neg[i].count});
  }
  write_table(dir, "negations", h, nt, fmt);

  Table kt{{"word", "count", "score"}, {}};
  if (table.distinct() > 0) {
    std::optional<WordTable> flagged;
    if (rules) flagged = flagged_word_table(events, rules->rules);
    const auto kws =
        suggest_keywords(table, flagged ? &*flagged : nullptr, KeywordOptions{});
    for (std::size_t i = 0; i < limit(kws.size()); ++i) {
      kt.rows.push_back({kws[i].word, kws[i].count, format_double(kws[i].score)});
    }
  }
  write_table(dir, "keywords", h, kt, fmt);

  out_ << "words: " << table.total << " total, " << table.distinct()
       << " distinct over " << table.events << " events\n";
  return 0;
}

int Runner::phrases(const Common& c, std::vector<std::string> phrases) {
  if (phrases.empty()) {
    phrases = {"not able", "not capable", "no user action is required"};
  }
  for (const auto& p : phrases) {
    if (text::trim(p).empty()) throw UsageError("--phrase must not be empty");
  }
  const Loaded data = load_store(c);
  const auto hits = find_phrases(data.store.events(), phrases);

  ReportHeader h{"phrases", {}, data.digest};
  echo_common(h, c);
  std::string joined;
  for (const auto& p : phrases) {
    if (!joined.empty()) joined += '|';
    joined += p;
  }
  h.set("phrases", joined);

  Table t{{"phrase", "seq", "offset", "length"}, {}};
  std::map<std::string, std::size_t> per_phrase;
  for (const auto& p : phrases) per_phrase[p] = 0;
  for (const auto& hit : hits) {
    t.rows.push_back({hit.phrase, hit.seq, hit.offset, hit.length});
    ++per_phrase[hit.phrase];
  }
  write_table(output_dir(c), "phrases", h, t, output_format(c));
  for (const auto& p : phrases) {
    out_ << '"' << p << "\": " << per_phrase[p] << '\n';
  }
  return 0;
}

Runner::Streams Runner::streams_for(const Loaded& data, const SequenceFlags& s,
                                    const MinerFlags& m, ReportHeader& h) {
  const auto mode = parse_key_mode(s.mode);
  const auto scope = parse_scope(s.scope);
  if (!mode) throw UsageError("bad --mode '" + s.mode + "'");
  if (!scope) throw UsageError("bad --scope '" + s.scope + "'");
  h.set("mode", std::string(to_string(*mode)));
  h.set("scope", std::string(to_string(*scope)));

  Streams result;
  StreamInputs inputs;
  std::optional<TemplateCatalog> catalog;
  if (!s.rules.empty()) {
    result.rules = load_rule_file(s.rules);
    h.set("rules", s.rules);
    h.set("rules-sha256", result.rules->digest);
    inputs.rules = &result.rules->rules;
  }
  if (*mode == KeyMode::Class && !result.rules) {
    throw UsageError("--mode class requires --rules");
  }
  if (*mode == KeyMode::Template) {
    const auto kinds = parse_mask_list(m.mask);
    const MinerConfig cfg = miner_config(m, kinds, data.store);
    catalog = mine_templates(data.store.events(), cfg);
    if (m.merge_distance > 0) {
      catalog = merge_templates(*catalog, m.merge_distance);
    }
    inputs.catalog = &*catalog;
    echo_miner(h, m, kinds, cfg.effective_support(data.store.size()));
  }
  result.streams = build_streams(data.store.events(), *mode, *scope, inputs);
  return result;
}

int Runner::pairs(const Common& c, const SequenceFlags& s, const MinerFlags& m,
                  const std::string& min_confidence, std::size_t min_support) {
  Ratio cmin;
  try {
    cmin = parse_ratio(min_confidence);
  } catch (const ArgumentError& e) {
    throw UsageError(std::string("--min-confidence: ") + e.what());
  }
  if (cmin <= Ratio(0) || cmin > Ratio(1)) {
    throw UsageError("--min-confidence must be within (0,1]");
  }
  if (min_support == 0) throw UsageError("--min-support must be >= 1");
  const Loaded data = load_store(c);
  ReportHeader h{"pairs", {}, data.digest};
  echo_common(h, c);
  const Streams st = streams_for(data, s, m, h);
  h.set("min-confidence", format_ratio(cmin));
  h.set("min-support", std::to_string(min_support));

  const auto all = mine_pairs(st.streams);
  const auto kept = filter_confident(all, cmin, min_support);
  Table t{{"A", "B", "pair_count", "antecedent_total", "confidence"}, {}};
  for (const auto& p : kept) {
    t.rows.push_back({p.antecedent, p.successor, p.pair_count,
                      p.antecedent_total, format_ratio(p.confidence())});
  }
  write_table(output_dir(c), "pairs", h, t, output_format(c));
  out_ << "pairs: " << all.size() << " distinct, " << kept.size()
       << " reported, " << st.streams.skipped << " events without key\n";
  return 0;
}

int Runner::ngrams(const Common& c, const SequenceFlags& s, const MinerFlags& m,
                   std::size_t n_max, std::size_t min_support) {
  if (n_max < 2) throw UsageError("--n-max must be >= 2");
  if (min_support == 0) throw UsageError("--min-support must be >= 1");
  const Loaded data = load_store(c);
  ReportHeader h{"ngrams", {}, data.digest};
  echo_common(h, c);
  const Streams st = streams_for(data, s, m, h);
  h.set("n-max", std::to_string(n_max));
  h.set("min-support", std::to_string(min_support));

  const auto grams = mine_ngrams(st.streams, n_max, min_support);
  Table t{{"n", "keys", "count"}, {}};
  for (const auto& g : grams) {
    std::string keys;
    for (const auto& k : g.keys) {
      if (!keys.empty()) keys += '|';
      keys += k;
    }
    t.rows.push_back({g.keys.size(), keys, g.count});
  }
  write_table(output_dir(c), "ngrams", h, t, output_format(c));
  out_ << "ngrams: " << grams.size() << " reported\n";
  return 0;
}

int Runner::profile(const Common& c, const SequenceFlags& s,
                    const MinerFlags& m, std::size_t n_max,
                    std::size_t min_support, const ProfileOptions& opts) {
  if (n_max < 2) throw UsageError("--n-max must be >= 2");
  if (min_support == 0) throw UsageError("--min-support must be >= 1");
  const Loaded data = load_store(c);
  ReportHeader h{"profile", {}, data.digest};
  echo_common(h, c);
  const Streams st = streams_for(data, s, m, h);
  h.set("n-max", std::to_string(n_max));
  h.set("min-support", std::to_string(min_support));
  h.set("top-pairs", std::to_string(opts.top_pairs));
  h.set("top-ngrams", std::to_string(opts.top_ngrams));
  h.set("deterministic-min-support",
        std::to_string(opts.deterministic_min_support));

  const auto pair_stats = mine_pairs(st.streams);
  const auto grams = mine_ngrams(st.streams, n_max, min_support);
  std::optional<ClassTally> tally;
  if (st.rules) tally = classify_all(data.store.events(), st.rules->rules);
  const Profile prof = profile_report(st.streams, pair_stats, grams,
                                      tally ? &*tally : nullptr, opts);

  Json doc = Json::object();
  doc["header"] = h.to_json();
  doc["profile"] = Json::parse(to_json(prof));
  const fs::path path = output_dir(c) / "profile.json";
  write_file(path, doc.dump(2, ' ', false, Json::error_handler_t::replace) + "\n");
  out_ << "profile: " << prof.scopes.size() << " scopes, "
       << prof.distinct_pairs << " distinct pairs, "
       << prof.deterministic_pairs.size() << " deterministic\n";
  return 0;
}

}  // namespace

int run(std::span<const std::string> args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"logmorph: log exploration toolkit", "logmorph"};
  app.set_version_flag("--version", std::string(version()));
  app.require_subcommand(1, 1);
  app.fallthrough();

  Common common;
  MinerFlags miner;
  SequenceFlags seq;

  // ingest
  std::vector<std::string> inputs;
  std::string in_format = "syslog";
  int year = 1970;
  std::string tz;
  std::string default_host;
  auto* ingest = app.add_subcommand("ingest", "Parse log files into a store");
  ingest->add_option("files", inputs, "Input files")->required();
  ingest->add_option("--format", in_format,
                     "Input format: syslog, wincsv, sendmail, ndjson")
      ->capture_default_str();
  auto* year_opt =
      ingest->add_option("--year", year, "Year for timestamps without one");
  ingest->add_option("--tz", tz, "UTC offset of local timestamps, e.g. +02:00");
  ingest->add_option("--host", default_host,
                     "Host for records without one (default localhost)");
  add_common(ingest, common, false);

  std::string rules_path;
  auto* classify = app.add_subcommand("classify", "Classify events with rules");
  add_common(classify, common);
  classify->add_option("--rules", rules_path, "Rule file")->required();

  bool refine = false;
  auto* templates = app.add_subcommand("templates", "Mine message templates");
  add_common(templates, common);
  add_miner(templates, miner);
  templates->add_flag("--refine", refine,
                      "Also report the timestamp/pid, +host, +merge curve");

  std::size_t top = 0;
  auto* words = app.add_subcommand("words", "Word frequencies and keywords");
  add_common(words, common);
  words->add_option("--rules", rules_path, "Rule file for keyword boosting");
  words->add_option("--top", top, "Rows per report (0 = all)");

  std::vector<std::string> phrase_list;
  auto* phrases = app.add_subcommand("phrases", "Locate phrases in messages");
  add_common(phrases, common);
  phrases->add_option("--phrase", phrase_list, "Phrase to find (repeatable)");

  std::string min_conf = "0.5";
  std::size_t min_support = 1;
  auto* pairs = app.add_subcommand("pairs", "Mine adjacent event pairs");
  add_common(pairs, common);
  add_sequence(pairs, seq);
  add_miner(pairs, miner);
  pairs->add_option("--min-confidence", min_conf,
                    "Keep pairs with confidence >= this (decimal or a/b)")
      ->capture_default_str();
  pairs->add_option("--min-support", min_support,
                    "Keep pairs whose antecedent occurs at least this often")
      ->capture_default_str();

  std::size_t n_max = 4;
  std::size_t gram_support = 2;
  auto* ngrams = app.add_subcommand("ngrams", "Mine frequent event sequences");
  add_common(ngrams, common);
  add_sequence(ngrams, seq);
  add_miner(ngrams, miner);
  ngrams->add_option("--n-max", n_max, "Longest sequence length")
      ->capture_default_str();
  ngrams->add_option("--min-support", gram_support, "Minimum occurrences")
      ->capture_default_str();

  ProfileOptions popts;
  auto* profile = app.add_subcommand("profile", "Per-scope operational profile");
  add_common(profile, common);
  add_sequence(profile, seq);
  add_miner(profile, miner);
  profile->add_option("--n-max", n_max, "Longest sequence length")
      ->capture_default_str();
  profile->add_option("--min-support", gram_support,
                      "Minimum n-gram occurrences")
      ->capture_default_str();
  profile->add_option("--top-pairs", popts.top_pairs)->capture_default_str();
  profile->add_option("--top-ngrams", popts.top_ngrams)->capture_default_str();
  profile->add_option("--deterministic-min-support",
                      popts.deterministic_min_support)
      ->capture_default_str();

  std::vector<std::string> argv_storage;
  argv_storage.reserve(args.size() + 1);
  argv_storage.emplace_back("logmorph");
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_storage) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << "logmorph " << version() << '\n';
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "logmorph: " << e.what() << '\n' << app.help();
    return 2;
  }

  Runner runner(out);
  try {
    if (*ingest) {
      return runner.ingest(inputs, in_format, year, year_opt->count() > 0, tz,
                           default_host, common);
    }
    if (*classify) return runner.classify(common, rules_path);
    if (*templates) return runner.templates(common, miner, refine);
    if (*words) return runner.words(common, rules_path, top);
    if (*phrases) return runner.phrases(common, phrase_list);
    if (*pairs) {
      return runner.pairs(common, seq, miner, min_conf, min_support);
    }
    if (*ngrams) return runner.ngrams(common, seq, miner, n_max, gram_support);
    if (*profile) {
      return runner.profile(common, seq, miner, n_max, gram_support, popts);
    }
  } catch (const UsageError& e) {
    err << "logmorph: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "logmorph: error: " << text::single_line(e.what()) << '\n';
    return 1;
  }
  return 2;
}

}  // namespace logmorph::cli
