#include "logmorph/templates.hpp"

#include "logmorph/error.hpp"
#include "logmorph/text.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <numeric>
#include <ostream>
#include <unordered_map>
#include <unordered_set>

namespace logmorph {

namespace {

constexpr std::array<std::string_view, 6> kMaskNames = {
    "timestamp", "pid", "host", "ip", "number", "hex"};

constexpr std::array<std::string_view, 7> kTypeNames = {
    "Port", "WebAddress", "VersionNumber", "FileName",
    "ErrorCode", "Number", "Unknown"};

bool strip_char(char c) { return c == ',' || c == '.' || c == ';' || c == ':'; }

}  // namespace

std::string_view to_string(MaskKind k) noexcept {
  return kMaskNames[static_cast<std::size_t>(k)];
}

std::optional<MaskKind> parse_mask_kind(std::string_view s) {
  const std::string lower = text::to_lower_ascii(text::trim(s));
  if (lower == "ts") return MaskKind::Timestamp;
  for (std::size_t i = 0; i < kMaskNames.size(); ++i) {
    if (lower == kMaskNames[i]) return static_cast<MaskKind>(i);
  }
  return std::nullopt;
}

std::string_view to_string(VariableType t) noexcept {
  return kTypeNames[static_cast<std::size_t>(t)];
}

TokenSeq tokenize(std::string_view message) {
  TokenSeq out;
  for (std::string_view piece : text::split_whitespace(message)) {
    while (!piece.empty() && strip_char(piece.back())) piece.remove_suffix(1);
    if (!piece.empty()) out.push_back(Token{std::string(piece), std::nullopt});
  }
  return out;
}

namespace {

std::string_view placeholder(std::optional<MaskKind> mask) {
  return mask == MaskKind::Timestamp ? kWildcard : kVariable;
}

}  // namespace

std::string render(const TokenSeq& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.push_back(' ');
    if (tokens[i].mask) {
      out += placeholder(tokens[i].mask);
    } else {
      out += tokens[i].text;
    }
  }
  return out;
}

MaskStage builtin_stage(MaskKind kind) {
  switch (kind) {
    case MaskKind::Timestamp:
      return {kind, Pattern(
          R"(\d{1,2}:\d{2}:\d{2}([.,]\d+)?)"
          R"(|\d{4}-\d{2}-\d{2}([T ]?\d{2}:\d{2}(:\d{2}([.,]\d+)?)?(Z|[+-]\d{2}:?\d{2})?)?)"
          R"(|\d{1,2}/\d{1,2}/\d{4})"
          R"(|\d{1,2}\.\d{1,2}\.\d{4})")};
    case MaskKind::Pid:
      return {kind, Pattern(
          R"(\d+|\[\d+\]|[A-Za-z_][\w.-]*\[\d+\]|[Pp][Ii][Dd][=:]\d+)")};
    case MaskKind::Host:
      return {kind, Pattern(
          R"([A-Za-z][A-Za-z_-]*\d+[A-Za-z0-9_-]*(\.[A-Za-z0-9-]+)*)")};
    case MaskKind::Ip:
      return {kind, Pattern(
          R"(\[?(\d{1,3}\.){3}\d{1,3}\]?(:\d{1,5})?)"
          R"(|([0-9A-Fa-f]{1,4}:){7}[0-9A-Fa-f]{1,4})"
          R"(|([0-9A-Fa-f]{1,4}(:[0-9A-Fa-f]{1,4})*)?::([0-9A-Fa-f]{1,4}(:[0-9A-Fa-f]{1,4})*)?)")};
    case MaskKind::Number:
      return {kind, Pattern(R"([-+]?\d+(\.\d+)?)")};
    case MaskKind::Hex:
      return {kind, Pattern(R"(0[xX][0-9A-Fa-f]+|[0-9A-Fa-f]{8,})")};
  }
  throw ArgumentError("unknown mask kind");
}

std::vector<MaskStage> builtin_stages(std::span<const MaskKind> kinds) {
  std::vector<MaskStage> out;
  out.reserve(kinds.size());
  for (MaskKind k : kinds) out.push_back(builtin_stage(k));
  return out;
}

MaskStage host_stage(std::span<const std::string> hosts) {
  std::vector<std::string> sorted(hosts.begin(), hosts.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  // An empty alternation would match the empty token only; use a pattern
  // that never matches a real token instead.
  if (sorted.empty()) return {MaskKind::Host, Pattern("[^\\s\\S]")};
  std::string expr;
  for (const auto& h : sorted) {
    if (h.empty()) continue;
    if (!expr.empty()) expr.push_back('|');
    expr += Pattern::escape(h);
  }
  if (expr.empty()) return {MaskKind::Host, Pattern("[^\\s\\S]")};
  return {MaskKind::Host, Pattern(expr, /*ignore_case=*/true)};
}

TokenSeq apply_masks(TokenSeq tokens, std::span<const MaskStage> stages) {
  for (Token& t : tokens) {
    if (t.mask) continue;
    for (const MaskStage& stage : stages) {
      if (stage.pattern.matches(t.text)) {
        t.mask = stage.kind;
        break;
      }
    }
  }
  return tokens;
}

std::size_t unique_skeleton_count(std::span<const EventRecord> events,
                                  std::span<const MaskStage> stages) {
  std::unordered_set<std::string> seen;
  for (const auto& e : events) {
    seen.insert(render(apply_masks(tokenize(e.message), stages)));
  }
  return seen.size();
}

double token_distance(const TokenSeq& a, const TokenSeq& b) {
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  if (n == 0 && m == 0) return 0.0;
  std::vector<std::size_t> prev(m + 1), cur(m + 1);
  std::iota(prev.begin(), prev.end(), std::size_t{0});
  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= m; ++j) {
      const std::size_t subst = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, subst});
    }
    std::swap(prev, cur);
  }
  return static_cast<double>(prev[m]) / static_cast<double>(std::max(n, m));
}

// -- variable typing ----------------------------------------------------------

namespace {

struct TypePatterns {
  Pattern port{R"(\d{1,5})"};
  Pattern web{R"([A-Za-z][A-Za-z0-9+.-]*://\S+|[Ww][Ww][Ww]\.\S+)"};
  Pattern version{R"(\d+(\.\d+)+)"};
  Pattern file{R"(.*[/\\].*|.+\.[A-Za-z][A-Za-z0-9]{0,7})"};
  Pattern hex_code{R"(0[xX][0-9A-Fa-f]+)"};
  Pattern keyed_code{R"((?i)(error|err|code)[=:#][-+]?\d+)"};
  Pattern signed_int{R"([-+]?\d+)"};
  Pattern number{R"([-+]?\d+(\.\d+)?)"};
};

const TypePatterns& type_patterns() {
  static const TypePatterns p;
  return p;
}

}  // namespace

bool value_has_type(VariableType type, std::string_view value,
                    std::string_view previous) {
  const TypePatterns& p = type_patterns();
  switch (type) {
    case VariableType::Port: {
      if (!p.port.matches(value)) return false;
      unsigned v = 0;
      std::from_chars(value.data(), value.data() + value.size(), v);
      return v <= 65535;
    }
    case VariableType::WebAddress:
      return p.web.matches(value);
    case VariableType::VersionNumber:
      return p.version.matches(value);
    case VariableType::FileName:
      return p.file.matches(value);
    case VariableType::ErrorCode: {
      if (p.hex_code.matches(value) || p.keyed_code.matches(value)) return true;
      if (!p.signed_int.matches(value)) return false;
      while (!previous.empty() && strip_char(previous.back())) {
        previous.remove_suffix(1);
      }
      const std::string prev = text::to_lower_ascii(previous);
      return prev == "error" || prev == "code";
    }
    case VariableType::Number:
      return p.number.matches(value);
    case VariableType::Unknown:
      return false;
  }
  return false;
}

// -- templates ----------------------------------------------------------------

std::string Slot::render() const {
  if (is_const) return text;
  std::string out(placeholder(mask));
  if (type && type->type != VariableType::Unknown) {
    out += ':';
    out += to_string(type->type);
  }
  return out;
}

std::size_t Template::const_count() const {
  return static_cast<std::size_t>(std::count_if(
      slots.begin(), slots.end(), [](const Slot& s) { return s.is_const; }));
}

std::string Template::render() const {
  std::string out;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (i) out.push_back(' ');
    out += slots[i].render();
  }
  return out;
}

std::vector<MaskStage> MinerConfig::default_stages() {
  const std::array kinds{MaskKind::Timestamp, MaskKind::Pid};
  return builtin_stages(kinds);
}

std::size_t MinerConfig::effective_support(std::size_t corpus_size) const {
  if (support) return *support;
  const auto scaled = static_cast<std::size_t>(
      std::ceil(0.001 * static_cast<double>(corpus_size)));
  return std::max<std::size_t>(2, scaled);
}

void MinerConfig::validate() const {
  if (support && *support < 2) {
    throw ConfigError("support threshold must be at least 2");
  }
  if (!(type_threshold > 0.0 && type_threshold <= 1.0)) {
    throw ConfigError("type threshold must lie in (0, 1]");
  }
  if (!(merge_distance >= 0.0 && merge_distance <= 1.0)) {
    throw ConfigError("merge distance must lie in [0, 1]");
  }
}

const Template* TemplateCatalog::find(TemplateId id) const {
  const auto it = std::lower_bound(
      templates.begin(), templates.end(), id,
      [](const Template& t, TemplateId v) { return t.id < v; });
  if (it == templates.end() || it->id != id) return nullptr;
  return &*it;
}

std::optional<TemplateId> TemplateCatalog::assignment(std::uint64_t seq) const {
  const auto it = std::lower_bound(
      assignments.begin(), assignments.end(), seq,
      [](const auto& a, std::uint64_t s) { return a.first < s; });
  if (it == assignments.end() || it->first != seq) return std::nullopt;
  return it->second;
}

std::size_t TemplateCatalog::total_support() const {
  std::size_t sum = 0;
  for (const auto& t : templates) sum += t.support;
  return sum;
}

namespace {

struct PairHash {
  std::size_t operator()(const std::pair<std::uint32_t, std::string>& p) const {
    return std::hash<std::string>{}(p.second) * 31u + p.first;
  }
};

void push_example(std::vector<std::uint64_t>& examples, std::uint64_t seq) {
  if (examples.size() < 3) examples.push_back(seq);
}

/// Var slot mask: the common kind when every value at the position was
/// masked with the same kind.
std::optional<MaskKind> common_mask(const std::vector<const TokenSeq*>& members,
                                    std::size_t pos) {
  std::optional<MaskKind> kind;
  for (const TokenSeq* seq : members) {
    const Token& t = (*seq)[pos];
    if (!t.mask) return std::nullopt;
    if (kind && *kind != *t.mask) return std::nullopt;
    kind = t.mask;
  }
  return kind;
}

}  // namespace

TemplateCatalog mine_templates(std::span<const EventRecord> events,
                               const MinerConfig& cfg) {
  cfg.validate();
  TemplateCatalog catalog;
  catalog.stages = cfg.stages;
  catalog.support_threshold = cfg.effective_support(events.size());
  const std::size_t s = catalog.support_threshold;

  std::vector<TokenSeq> seqs;
  seqs.reserve(events.size());
  for (const auto& e : events) {
    seqs.push_back(apply_masks(tokenize(e.message), cfg.stages));
  }

  // Masked tokens are never frequent: they are variables by construction.
  std::unordered_map<std::pair<std::uint32_t, std::string>, std::size_t,
                     PairHash>
      counts;
  for (const auto& seq : seqs) {
    for (std::uint32_t pos = 0; pos < seq.size(); ++pos) {
      if (!seq[pos].masked()) ++counts[{pos, seq[pos].text}];
    }
  }
  const auto frequent = [&](std::uint32_t pos, const Token& t) {
    if (t.masked()) return false;
    const auto it = counts.find({pos, t.text});
    return it != counts.end() && it->second >= s;
  };

  struct Cluster {
    std::vector<std::size_t> members;  // indices into events
    std::vector<bool> const_positions;
    std::size_t const_count = 0;
  };
  std::vector<Cluster> clusters;
  std::unordered_map<std::string, std::size_t> by_key;
  std::vector<std::size_t> cluster_of(events.size());

  for (std::size_t i = 0; i < seqs.size(); ++i) {
    const TokenSeq& seq = seqs[i];
    std::string key = std::to_string(seq.size());
    std::vector<bool> positions(seq.size(), false);
    std::size_t n_const = 0;
    for (std::uint32_t pos = 0; pos < seq.size(); ++pos) {
      if (frequent(pos, seq[pos])) {
        key += '\x1f';
        key += std::to_string(pos);
        key += '\x1e';
        key += seq[pos].text;
        positions[pos] = true;
        ++n_const;
      }
    }
    auto [it, inserted] = by_key.try_emplace(std::move(key), clusters.size());
    if (inserted) {
      clusters.push_back(Cluster{{}, std::move(positions), n_const});
    }
    clusters[it->second].members.push_back(i);
    cluster_of[i] = it->second;
  }

  // Ids follow first appearance in input order.
  std::vector<TemplateId> id_of(clusters.size(), kOutlierId);
  TemplateId next_id = 1;
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    const Cluster& cl = clusters[c];
    // A cluster without any constant token is not a class; it is noise.
    if (cl.members.size() < s || cl.const_count == 0) continue;
    id_of[c] = next_id;
    Template t;
    t.id = next_id++;
    t.support = cl.members.size();
    const TokenSeq& first = seqs[cl.members.front()];
    std::vector<const TokenSeq*> member_seqs;
    member_seqs.reserve(cl.members.size());
    for (std::size_t m : cl.members) member_seqs.push_back(&seqs[m]);
    for (std::size_t pos = 0; pos < first.size(); ++pos) {
      if (cl.const_positions[pos]) {
        t.slots.push_back(Slot::constant(first[pos].text));
      } else {
        t.slots.push_back(Slot::variable(common_mask(member_seqs, pos)));
      }
    }
    for (std::size_t m : cl.members) push_example(t.example_seqs, events[m].seq);
    catalog.templates.push_back(std::move(t));
  }

  catalog.assignments.reserve(events.size());
  for (std::size_t i = 0; i < events.size(); ++i) {
    const TemplateId id = id_of[cluster_of[i]];
    if (id == kOutlierId) {
      ++catalog.outliers;
      push_example(catalog.outlier_examples, events[i].seq);
    }
    catalog.assignments.emplace_back(events[i].seq, id);
  }
  std::sort(catalog.assignments.begin(), catalog.assignments.end());
  std::sort(catalog.outlier_examples.begin(), catalog.outlier_examples.end());
  return catalog;
}

namespace {

/// Positional distance between equal-length slot sequences.
double slot_distance(const Template& a, const Template& b) {
  std::size_t diff = 0;
  for (std::size_t i = 0; i < a.slots.size(); ++i) {
    const Slot& x = a.slots[i];
    const Slot& y = b.slots[i];
    if (x.is_const != y.is_const) {
      ++diff;
    } else if (x.is_const && x.text != y.text) {
      ++diff;
    }
  }
  return static_cast<double>(diff) / static_cast<double>(a.slots.size());
}

struct DisjointSet {
  std::vector<std::size_t> parent;
  explicit DisjointSet(std::size_t n) : parent(n) {
    std::iota(parent.begin(), parent.end(), std::size_t{0});
  }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

Template merge_group(const std::vector<const Template*>& group) {
  Template merged;
  merged.id = group.front()->id;
  const std::size_t len = group.front()->slots.size();
  for (std::size_t pos = 0; pos < len; ++pos) {
    const Slot& first = group.front()->slots[pos];
    bool all_same_const = first.is_const;
    std::optional<MaskKind> mask;
    if (!first.is_const) mask = first.mask;
    bool all_var_same_mask = !first.is_const;
    for (const Template* t : group) {
      const Slot& s = t->slots[pos];
      if (!s.is_const || s.text != first.text) all_same_const = false;
      if (s.is_const || s.mask != mask) all_var_same_mask = false;
    }
    if (all_same_const) {
      merged.slots.push_back(Slot::constant(first.text));
    } else {
      merged.slots.push_back(
          Slot::variable(all_var_same_mask ? mask : std::nullopt));
    }
  }
  std::vector<std::uint64_t> examples;
  for (const Template* t : group) {
    merged.id = std::min(merged.id, t->id);
    merged.support += t->support;
    examples.insert(examples.end(), t->example_seqs.begin(),
                    t->example_seqs.end());
  }
  std::sort(examples.begin(), examples.end());
  examples.resize(std::min<std::size_t>(examples.size(), 3));
  merged.example_seqs = std::move(examples);
  return merged;
}

}  // namespace

TemplateCatalog merge_templates(const TemplateCatalog& catalog,
                                double distance) {
  if (!(distance >= 0.0 && distance <= 1.0)) {
    throw ArgumentError("merge distance must lie in [0, 1]");
  }
  const auto& input = catalog.templates;
  DisjointSet sets(input.size());
  std::unordered_map<std::size_t, std::vector<std::size_t>> by_length;
  for (std::size_t i = 0; i < input.size(); ++i) {
    by_length[input[i].slots.size()].push_back(i);
  }
  for (const auto& [len, members] : by_length) {
    for (std::size_t a = 0; a < members.size(); ++a) {
      for (std::size_t b = a + 1; b < members.size(); ++b) {
        if (slot_distance(input[members[a]], input[members[b]]) <= distance) {
          sets.unite(members[a], members[b]);
        }
      }
    }
  }

  std::unordered_map<std::size_t, std::vector<const Template*>> groups;
  for (std::size_t i = 0; i < input.size(); ++i) {
    groups[sets.find(i)].push_back(&input[i]);
  }

  TemplateCatalog out;
  out.outliers = catalog.outliers;
  out.outlier_examples = catalog.outlier_examples;
  out.stages = catalog.stages;
  out.support_threshold = catalog.support_threshold;
  std::unordered_map<TemplateId, TemplateId> remap;
  for (auto& [root, group] : groups) {
    if (group.size() == 1) {
      out.templates.push_back(*group.front());
      remap[group.front()->id] = group.front()->id;
      continue;
    }
    Template merged = merge_group(group);
    if (merged.const_count() == 0) {
      // Collapsing everything into an all-variable class loses the class
      // structure; keep the members apart.
      for (const Template* t : group) {
        out.templates.push_back(*t);
        remap[t->id] = t->id;
      }
      continue;
    }
    for (const Template* t : group) remap[t->id] = merged.id;
    out.templates.push_back(std::move(merged));
  }
  std::sort(out.templates.begin(), out.templates.end(),
            [](const Template& a, const Template& b) { return a.id < b.id; });

  out.assignments = catalog.assignments;
  for (auto& [seq, id] : out.assignments) {
    if (id != kOutlierId) id = remap.at(id);
  }
  return out;
}

TemplateCatalog type_variables(const TemplateCatalog& catalog,
                               std::span<const EventRecord> events,
                               double threshold) {
  if (!(threshold > 0.0 && threshold <= 1.0)) {
    throw ArgumentError("type threshold must lie in (0, 1]");
  }
  TemplateCatalog out = catalog;
  std::unordered_map<TemplateId, std::size_t> index;
  for (std::size_t i = 0; i < out.templates.size(); ++i) {
    index[out.templates[i].id] = i;
  }

  constexpr std::size_t kTypes = 6;  // every type except Unknown
  struct SlotCounts {
    std::size_t values = 0;
    std::array<std::size_t, kTypes> hits{};
  };
  std::vector<std::vector<SlotCounts>> counts(out.templates.size());
  for (std::size_t i = 0; i < out.templates.size(); ++i) {
    counts[i].resize(out.templates[i].slots.size());
  }

  for (const auto& e : events) {
    const auto id = catalog.assignment(e.seq);
    if (!id || *id == kOutlierId) continue;
    const std::size_t ti = index.at(*id);
    const Template& t = out.templates[ti];
    const TokenSeq tokens = tokenize(e.message);
    if (tokens.size() != t.slots.size()) continue;
    for (std::size_t pos = 0; pos < tokens.size(); ++pos) {
      if (t.slots[pos].is_const) continue;
      SlotCounts& c = counts[ti][pos];
      ++c.values;
      const std::string_view prev =
          pos > 0 ? std::string_view(tokens[pos - 1].text) : std::string_view{};
      for (std::size_t k = 0; k < kTypes; ++k) {
        if (value_has_type(static_cast<VariableType>(k), tokens[pos].text,
                           prev)) {
          ++c.hits[k];
        }
      }
    }
  }

  for (std::size_t ti = 0; ti < out.templates.size(); ++ti) {
    Template& t = out.templates[ti];
    for (std::size_t pos = 0; pos < t.slots.size(); ++pos) {
      Slot& slot = t.slots[pos];
      if (slot.is_const) continue;
      const SlotCounts& c = counts[ti][pos];
      SlotType result;
      if (c.values > 0) {
        double best = 0.0;
        for (std::size_t k = 0; k < kTypes; ++k) {
          const double ratio =
              static_cast<double>(c.hits[k]) / static_cast<double>(c.values);
          if (ratio >= threshold && result.type == VariableType::Unknown) {
            result.type = static_cast<VariableType>(k);
            result.ratio = ratio;
          }
          best = std::max(best, ratio);
        }
        if (result.type == VariableType::Unknown) result.ratio = best;
      }
      slot.type = result;
    }
  }
  return out;
}

std::optional<TemplateId> match_template(std::string_view message,
                                         const TemplateCatalog& catalog,
                                         std::span<const MaskStage> stages) {
  const TokenSeq tokens = apply_masks(tokenize(message), stages);
  const Template* best = nullptr;
  std::size_t best_consts = 0;
  for (const Template& t : catalog.templates) {
    if (t.slots.size() != tokens.size()) continue;
    bool ok = true;
    std::size_t consts = 0;
    for (std::size_t i = 0; i < tokens.size() && ok; ++i) {
      const Slot& slot = t.slots[i];
      if (!slot.is_const) continue;
      ok = !tokens[i].masked() && tokens[i].text == slot.text;
      ++consts;
    }
    if (!ok) continue;
    // Templates are in ascending id order, so strict improvement keeps the
    // lowest id among equals.
    if (!best || consts > best_consts) {
      best = &t;
      best_consts = consts;
    }
  }
  if (!best) return std::nullopt;
  return best->id;
}

std::size_t class_count(const TemplateCatalog& catalog,
                        std::span<const EventRecord> events) {
  std::unordered_set<std::string> outlier_skeletons;
  for (const auto& e : events) {
    const auto id = catalog.assignment(e.seq);
    if (id && *id == kOutlierId) {
      outlier_skeletons.insert(
          render(apply_masks(tokenize(e.message), catalog.stages)));
    }
  }
  return catalog.templates.size() + outlier_skeletons.size();
}

void write_catalog(const TemplateCatalog& catalog, std::ostream& out) {
  for (const Template& t : catalog.templates) {
    out << t.id << '\t' << t.support << '\t' << t.render() << '\n';
  }
  out << "# outliers\t" << catalog.outliers << '\n';
}

}  // namespace logmorph
