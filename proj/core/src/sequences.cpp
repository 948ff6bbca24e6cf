#include "logmorph/sequences.hpp"

#include "logmorph/error.hpp"
#include "logmorph/text.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <map>
#include <unordered_map>

namespace logmorph {

Ratio parse_ratio(std::string_view s) {
  s = text::trim(s);
  const auto bad = [&] {
    return ArgumentError("not a ratio: '" + std::string(s) + "'");
  };
  const auto parse_int = [&](std::string_view v) {
    std::int64_t out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (v.empty() || ec != std::errc{} || ptr != v.data() + v.size() ||
        out < 0) {
      throw bad();
    }
    return out;
  };

  if (const auto slash = s.find('/'); slash != std::string_view::npos) {
    const auto den = parse_int(s.substr(slash + 1));
    if (den == 0) throw bad();
    return Ratio(parse_int(s.substr(0, slash)), den);
  }
  const auto dot = s.find('.');
  if (dot == std::string_view::npos) return Ratio(parse_int(s));
  const std::string_view whole = s.substr(0, dot);
  const std::string_view frac = s.substr(dot + 1);
  if (frac.size() > 12 || (whole.empty() && frac.empty())) throw bad();
  std::int64_t scale = 1;
  for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
  const std::int64_t w = whole.empty() ? 0 : parse_int(whole);
  const std::int64_t f = frac.empty() ? 0 : parse_int(frac);
  return Ratio(w * scale + f, scale);
}

std::string format_ratio(const Ratio& r) {
  // Split off the integer part first so rem * 20000 stays within range.
  const std::int64_t den = r.denominator();
  long long whole = r.numerator() / den;
  const std::int64_t rem = r.numerator() % den;
  long long frac = (rem * 20000 + den) / (2 * den);  // half up
  if (frac == 10000) {
    ++whole;
    frac = 0;
  }
  char buf[48];
  std::snprintf(buf, sizeof buf, "%lld.%04lld", whole, frac);
  return buf;
}

std::string_view to_string(KeyMode m) noexcept {
  switch (m) {
    case KeyMode::Id: return "id";
    case KeyMode::Template: return "template";
    case KeyMode::Class: return "class";
  }
  return "?";
}

std::string_view to_string(Scope s) noexcept {
  switch (s) {
    case Scope::Global: return "global";
    case Scope::Host: return "host";
    case Scope::HostSource: return "host_source";
  }
  return "?";
}

std::optional<KeyMode> parse_key_mode(std::string_view s) {
  for (auto m : {KeyMode::Id, KeyMode::Template, KeyMode::Class}) {
    if (text::iequals_ascii(s, to_string(m))) return m;
  }
  return std::nullopt;
}

std::optional<Scope> parse_scope(std::string_view s) {
  for (auto v : {Scope::Global, Scope::Host, Scope::HostSource}) {
    if (text::iequals_ascii(s, to_string(v))) return v;
  }
  if (text::iequals_ascii(s, "host-source")) return Scope::HostSource;
  return std::nullopt;
}

KeyStreams KeyStreams::from_text(
    const std::vector<std::vector<std::string>>& streams) {
  KeyStreams out;
  std::unordered_map<std::string, Symbol> ids;
  for (std::size_t i = 0; i < streams.size(); ++i) {
    KeyStream ks;
    ks.scope = std::to_string(i);
    for (const auto& key : streams[i]) {
      auto [it, inserted] = ids.try_emplace(key, out.symbols.size());
      if (inserted) out.symbols.push_back(key);
      ks.keys.push_back(it->second);
    }
    out.streams.push_back(std::move(ks));
  }
  return out;
}

KeyStreams build_streams(std::span<const EventRecord> events, KeyMode mode,
                         Scope scope, const StreamInputs& inputs) {
  if (mode == KeyMode::Template && !inputs.catalog) {
    throw ArgumentError("template keys need a template catalog");
  }
  if (mode == KeyMode::Class && !inputs.rules) {
    throw ArgumentError("class keys need a rule set");
  }

  std::vector<const EventRecord*> ordered;
  ordered.reserve(events.size());
  for (const auto& e : events) ordered.push_back(&e);
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const EventRecord* a, const EventRecord* b) {
                     if (a->occurred_at != b->occurred_at) {
                       return a->occurred_at < b->occurred_at;
                     }
                     return a->seq < b->seq;
                   });

  KeyStreams out;
  std::unordered_map<std::string, Symbol> ids;
  std::map<std::string, std::vector<Symbol>> partitions;

  const auto key_of = [&](const EventRecord& e) -> std::optional<std::string> {
    switch (mode) {
      case KeyMode::Id:
        if (!e.event_id) return std::nullopt;
        if (e.source) return *e.source + ":" + std::to_string(*e.event_id);
        return std::to_string(*e.event_id);
      case KeyMode::Template: {
        auto id = inputs.catalog->assignment(e.seq);
        if (!id) {
          id = match_template(e.message, *inputs.catalog,
                              inputs.catalog->stages);
        }
        if (!id || *id == kOutlierId) return std::nullopt;
        return "T" + std::to_string(*id);
      }
      case KeyMode::Class: {
        const auto idx = classify_index(e, *inputs.rules);
        if (!idx) return std::nullopt;
        return inputs.rules->rules()[*idx].name;
      }
    }
    return std::nullopt;
  };

  for (const EventRecord* e : ordered) {
    const auto key = key_of(*e);
    if (!key) {
      ++out.skipped;
      continue;
    }
    std::string part;
    switch (scope) {
      case Scope::Global: part = "*"; break;
      case Scope::Host: part = e->host; break;
      case Scope::HostSource:
        part = e->host + "/" + e->source.value_or("-");
        break;
    }
    auto [it, inserted] = ids.try_emplace(*key, out.symbols.size());
    if (inserted) out.symbols.push_back(*key);
    partitions[part].push_back(it->second);
  }
  for (auto& [part, keys] : partitions) {
    out.streams.push_back({part, std::move(keys)});
  }
  return out;
}

namespace {

struct SymbolPairHash {
  std::size_t operator()(const std::pair<Symbol, Symbol>& p) const {
    return (static_cast<std::size_t>(p.first) << 32) ^ p.second;
  }
};

struct SymbolSeqHash {
  std::size_t operator()(const std::vector<Symbol>& v) const {
    std::size_t h = 1469598103934665603ull;
    for (Symbol s : v) h = (h ^ s) * 1099511628211ull;
    return h;
  }
};

}  // namespace

std::vector<PairStat> mine_pairs(const KeyStreams& streams) {
  std::unordered_map<std::pair<Symbol, Symbol>, std::size_t, SymbolPairHash>
      counts;
  std::unordered_map<Symbol, std::size_t> totals;
  for (const auto& stream : streams.streams) {
    for (std::size_t i = 0; i + 1 < stream.keys.size(); ++i) {
      ++counts[{stream.keys[i], stream.keys[i + 1]}];
      ++totals[stream.keys[i]];
    }
  }
  std::vector<PairStat> out;
  out.reserve(counts.size());
  for (const auto& [pair, n] : counts) {
    out.push_back({streams.text(pair.first), streams.text(pair.second), n,
                   totals.at(pair.first)});
  }
  std::sort(out.begin(), out.end(), [](const PairStat& a, const PairStat& b) {
    if (a.pair_count != b.pair_count) return a.pair_count > b.pair_count;
    if (a.antecedent != b.antecedent) return a.antecedent < b.antecedent;
    return a.successor < b.successor;
  });
  return out;
}

std::vector<PairStat> filter_confident(std::span<const PairStat> pairs,
                                       const Ratio& min_confidence,
                                       std::size_t min_support) {
  if (min_confidence <= Ratio(0) || min_confidence > Ratio(1)) {
    throw ArgumentError("minimum confidence must lie in (0, 1]");
  }
  if (min_support < 1) throw ArgumentError("minimum support must be >= 1");
  std::vector<PairStat> out;
  for (const auto& p : pairs) {
    if (p.confidence() >= min_confidence && p.antecedent_total >= min_support) {
      out.push_back(p);
    }
  }
  return out;
}

std::vector<SequenceStat> mine_ngrams(const KeyStreams& streams,
                                      std::size_t n_max,
                                      std::size_t min_support) {
  if (n_max < 2) throw ArgumentError("n_max must be >= 2");
  if (min_support < 1) throw ArgumentError("min_support must be >= 1");

  std::vector<SequenceStat> out;
  for (std::size_t n = 2; n <= n_max; ++n) {
    std::unordered_map<std::vector<Symbol>, std::size_t, SymbolSeqHash> counts;
    for (const auto& stream : streams.streams) {
      const auto& k = stream.keys;
      for (std::size_t i = 0; i + n <= k.size(); ++i) {
        ++counts[std::vector<Symbol>(k.begin() + static_cast<std::ptrdiff_t>(i),
                                     k.begin() + static_cast<std::ptrdiff_t>(i + n))];
      }
    }
    std::vector<SequenceStat> level;
    for (const auto& [gram, c] : counts) {
      if (c < min_support) continue;
      SequenceStat stat;
      stat.count = c;
      for (Symbol s : gram) stat.keys.push_back(streams.text(s));
      level.push_back(std::move(stat));
    }
    std::sort(level.begin(), level.end(),
              [](const SequenceStat& a, const SequenceStat& b) {
                if (a.count != b.count) return a.count > b.count;
                return a.keys < b.keys;
              });
    out.insert(out.end(), std::make_move_iterator(level.begin()),
               std::make_move_iterator(level.end()));
  }
  return out;
}

Profile profile_report(const KeyStreams& streams,
                       std::span<const PairStat> pairs,
                       std::span<const SequenceStat> ngrams,
                       const ClassTally* tally, const ProfileOptions& opts) {
  Profile p;
  for (const auto& stream : streams.streams) {
    ScopeProfile sp;
    sp.scope = stream.scope;
    sp.events = stream.keys.size();
    std::vector<Symbol> keys = stream.keys;
    std::sort(keys.begin(), keys.end());
    sp.distinct_keys = static_cast<std::size_t>(
        std::unique(keys.begin(), keys.end()) - keys.begin());
    std::vector<std::pair<Symbol, Symbol>> adj;
    for (std::size_t i = 0; i + 1 < stream.keys.size(); ++i) {
      adj.emplace_back(stream.keys[i], stream.keys[i + 1]);
    }
    std::sort(adj.begin(), adj.end());
    sp.distinct_pairs = static_cast<std::size_t>(
        std::unique(adj.begin(), adj.end()) - adj.begin());
    p.scopes.push_back(std::move(sp));
  }
  p.distinct_pairs = pairs.size();
  p.top_pairs.assign(pairs.begin(),
                     pairs.begin() + static_cast<std::ptrdiff_t>(
                                         std::min(opts.top_pairs, pairs.size())));
  p.deterministic_pairs =
      filter_confident(pairs, Ratio(1), opts.deterministic_min_support);
  // ngrams are grouped by n; keep the strongest of each length.
  std::map<std::size_t, std::size_t> taken;
  for (const auto& g : ngrams) {
    if (taken[g.keys.size()]++ < opts.top_ngrams) p.top_ngrams.push_back(g);
  }
  if (tally) p.tally = *tally;
  return p;
}

namespace {

using Json = nlohmann::ordered_json;

Json pair_json(const PairStat& p) {
  Json j;
  j["antecedent"] = p.antecedent;
  j["successor"] = p.successor;
  j["pair_count"] = p.pair_count;
  j["antecedent_total"] = p.antecedent_total;
  j["confidence"] = format_ratio(p.confidence());
  return j;
}

}  // namespace

std::string to_json(const Profile& profile) {
  Json j;
  Json scopes = Json::array();
  for (const auto& s : profile.scopes) {
    Json sj;
    sj["scope"] = s.scope;
    sj["events"] = s.events;
    sj["distinct_keys"] = s.distinct_keys;
    sj["distinct_pairs"] = s.distinct_pairs;
    scopes.push_back(std::move(sj));
  }
  j["scopes"] = std::move(scopes);
  j["distinct_pairs"] = profile.distinct_pairs;
  Json top = Json::array();
  for (const auto& p : profile.top_pairs) top.push_back(pair_json(p));
  j["top_pairs"] = std::move(top);
  Json det = Json::array();
  for (const auto& p : profile.deterministic_pairs) det.push_back(pair_json(p));
  j["deterministic_pairs"] = std::move(det);
  Json grams = Json::array();
  for (const auto& g : profile.top_ngrams) {
    Json gj;
    gj["n"] = g.keys.size();
    gj["keys"] = g.keys;
    gj["count"] = g.count;
    grams.push_back(std::move(gj));
  }
  j["top_ngrams"] = std::move(grams);

  if (profile.tally) {
    const ClassTally& t = *profile.tally;
    Json tj;
    tj["total"] = t.total;
    tj["unmatched"] = t.unmatched;
    Json classes = Json::array();
    for (std::size_t i = 0; i < t.class_names.size(); ++i) {
      if (t.per_class[i] == 0) continue;
      Json c;
      c["class"] = t.class_names[i];
      c["category"] = std::string(to_string(t.class_categories[i]));
      c["count"] = t.per_class[i];
      classes.push_back(std::move(c));
    }
    tj["classes"] = std::move(classes);
    Json cats;
    for (std::size_t c = 0; c < kCategoryCount; ++c) {
      cats[std::string(to_string(static_cast<Category>(c)))] = t.per_category[c];
    }
    tj["categories"] = std::move(cats);
    Json cross = Json::object();
    for (std::size_t s = 0; s < kSeverityCount; ++s) {
      Json row = Json::object();
      for (std::size_t c = 0; c < kCategoryCount; ++c) {
        if (t.cross_tab[s][c] == 0) continue;
        row[std::string(to_string(static_cast<Category>(c)))] = t.cross_tab[s][c];
      }
      if (!row.empty()) {
        cross[std::string(to_string(static_cast<Severity>(s)))] = std::move(row);
      }
    }
    tj["severity_by_category"] = std::move(cross);
    j["classes"] = std::move(tj);
  }
  return j.dump(2) + "\n";
}

}  // namespace logmorph
