#pragma once

#include "logmorph/event.hpp"
#include "logmorph/rules.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace logmorph {

struct WordCount {
  std::string word;
  std::size_t count = 0;
};

/// Case-folded word (or bigram) occurrence table over a set of events.
struct WordTable {
  std::size_t total = 0;
  std::map<std::string, std::size_t> counts;
  /// Number of events containing the word at least once.
  std::map<std::string, std::size_t> event_counts;
  std::size_t events = 0;

  std::size_t distinct() const noexcept { return counts.size(); }
  std::size_t count(std::string_view word) const;
  /// Count descending, then word ascending.
  std::vector<WordCount> ranked() const;
  void add(const std::string& word, bool first_in_event);
};

/// tokenize() output, case-folded; no masking.
WordTable word_frequencies(std::span<const EventRecord> events);

struct PhraseHit {
  std::string phrase;
  std::uint64_t seq = 0;
  /// Byte offset into the event's message where the occurrence starts.
  std::size_t offset = 0;
  /// Byte length of the occurrence in the message.
  std::size_t length = 0;
};

/// Case-insensitive, whitespace-normalized search. Overlapping occurrences
/// are all reported, in event order then offset order.
/// Throws ArgumentError for an empty phrase.
std::vector<PhraseHit> find_phrases(std::span<const EventRecord> events,
                                    std::span<const std::string> phrases);

/// Same normalization as find_phrases; used to re-check a hit.
bool phrase_at(std::string_view message, std::size_t offset,
               std::size_t length, std::string_view phrase);

/// Counts adjacent token pairs whose first token folds to "not".
WordTable negation_scan(std::span<const EventRecord> events);

struct KeywordOptions {
  /// Words present in more than this fraction of events are dropped.
  double ubiquity_cutoff = 0.5;
  std::vector<std::string> stopwords = default_stopwords();

  static std::vector<std::string> default_stopwords();
};

struct Keyword {
  std::string word;
  std::size_t count = 0;
  double score = 0.0;
};

/// Word table restricted to events the rules place outside the info
/// category, used to boost problem-related keywords.
WordTable flagged_word_table(std::span<const EventRecord> events,
                             const RuleSet& rules);

/// Ranks words by count after removing stopwords and ubiquitous words.
/// With `flagged`, a word whose event rate among flagged events exceeds its
/// corpus rate has its score multiplied by that ratio.
/// Throws ArgumentError for an empty table.
std::vector<Keyword> suggest_keywords(const WordTable& table,
                                      const WordTable* flagged = nullptr,
                                      const KeywordOptions& opts = {});

}  // namespace logmorph
