#pragma once

#include "logmorph/event.hpp"
#include "logmorph/rules.hpp"
#include "logmorph/templates.hpp"

#include <boost/rational.hpp>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace logmorph {

/// Exact confidence values; reports round to 4 decimals only when rendered.
using Ratio = boost::rational<std::int64_t>;

/// Parses "1", "0.5", "0.3333" or "1/3" exactly. Throws ArgumentError.
Ratio parse_ratio(std::string_view s);
/// Fixed 4-decimal rendering, rounded half up.
std::string format_ratio(const Ratio& r);

enum class KeyMode { Id, Template, Class };
enum class Scope { Global, Host, HostSource };

std::string_view to_string(KeyMode m) noexcept;
std::string_view to_string(Scope s) noexcept;
std::optional<KeyMode> parse_key_mode(std::string_view s);
std::optional<Scope> parse_scope(std::string_view s);

using Symbol = std::uint32_t;

/// Event keys of one scope partition, in (occurred_at, seq) order.
struct KeyStream {
  std::string scope;
  std::vector<Symbol> keys;
};

/// Interned key text plus the per-scope streams that refer to it.
struct KeyStreams {
  std::vector<std::string> symbols;
  std::vector<KeyStream> streams;  // ascending scope
  /// Events without a key in the chosen mode (no event id, outlier,
  /// unmatched).
  std::size_t skipped = 0;

  const std::string& text(Symbol s) const { return symbols[s]; }
  /// Builds streams directly from key text; handy for fixtures.
  static KeyStreams from_text(
      const std::vector<std::vector<std::string>>& streams);
};

struct StreamInputs {
  const TemplateCatalog* catalog = nullptr;  // Template mode
  const RuleSet* rules = nullptr;            // Class mode
};

/// Partitions events by scope and maps each to its key. Throws ArgumentError
/// when the mode's catalog or rule set is missing.
KeyStreams build_streams(std::span<const EventRecord> events, KeyMode mode,
                         Scope scope, const StreamInputs& inputs = {});

struct PairStat {
  std::string antecedent;
  std::string successor;
  std::size_t pair_count = 0;
  /// Occurrences of the antecedent as the first element of any pair.
  std::size_t antecedent_total = 0;

  Ratio confidence() const {
    return Ratio(static_cast<std::int64_t>(pair_count),
                 static_cast<std::int64_t>(antecedent_total));
  }
  friend bool operator==(const PairStat&, const PairStat&) = default;
};

/// Adjacent pairs within each stream, never across streams. Ordered by
/// pair_count descending, then (antecedent, successor).
std::vector<PairStat> mine_pairs(const KeyStreams& streams);

/// Pairs with confidence >= min_confidence and antecedent_total >=
/// min_support, order preserved.
std::vector<PairStat> filter_confident(std::span<const PairStat> pairs,
                                       const Ratio& min_confidence,
                                       std::size_t min_support);

struct SequenceStat {
  std::vector<std::string> keys;
  std::size_t count = 0;
  friend bool operator==(const SequenceStat&, const SequenceStat&) = default;
};

/// Contiguous n-grams for n in 2..n_max with overlapping occurrences
/// counted. Ordered by n, then count descending, then keys.
std::vector<SequenceStat> mine_ngrams(const KeyStreams& streams,
                                      std::size_t n_max,
                                      std::size_t min_support);

struct ProfileOptions {
  std::size_t top_pairs = 20;
  std::size_t top_ngrams = 20;
  std::size_t deterministic_min_support = 2;
};

struct ScopeProfile {
  std::string scope;
  std::size_t events = 0;
  std::size_t distinct_keys = 0;
  std::size_t distinct_pairs = 0;
};

/// Per-machine characterization built from one store.
struct Profile {
  std::vector<ScopeProfile> scopes;
  std::size_t distinct_pairs = 0;
  std::vector<PairStat> top_pairs;
  std::vector<PairStat> deterministic_pairs;
  std::vector<SequenceStat> top_ngrams;
  std::optional<ClassTally> tally;
};

Profile profile_report(const KeyStreams& streams,
                       std::span<const PairStat> pairs,
                       std::span<const SequenceStat> ngrams,
                       const ClassTally* tally,
                       const ProfileOptions& opts = {});

/// Pretty-printed JSON with a fixed key order, so two profiles diff cleanly
/// line by line.
std::string to_json(const Profile& profile);

}  // namespace logmorph
