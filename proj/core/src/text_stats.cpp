#include "logmorph/text_stats.hpp"

#include "logmorph/error.hpp"
#include "logmorph/templates.hpp"
#include "logmorph/text.hpp"

#include <algorithm>
#include <set>
#include <unordered_set>

namespace logmorph {

std::size_t WordTable::count(std::string_view word) const {
  const auto it = counts.find(std::string(word));
  return it == counts.end() ? 0 : it->second;
}

std::vector<WordCount> WordTable::ranked() const {
  std::vector<WordCount> out;
  out.reserve(counts.size());
  for (const auto& [w, c] : counts) out.push_back({w, c});
  std::stable_sort(out.begin(), out.end(),
                   [](const WordCount& a, const WordCount& b) {
                     return a.count > b.count;
                   });
  return out;
}

void WordTable::add(const std::string& word, bool first_in_event) {
  ++total;
  ++counts[word];
  if (first_in_event) ++event_counts[word];
}

WordTable word_frequencies(std::span<const EventRecord> events) {
  WordTable table;
  for (const auto& e : events) {
    ++table.events;
    std::unordered_set<std::string> seen;
    for (const Token& t : tokenize(e.message)) {
      std::string word = text::casefold(t.text);
      const bool first = seen.insert(word).second;
      table.add(word, first);
    }
  }
  return table;
}

namespace {

/// Case-folded, whitespace-collapsed text plus, for each byte of it, the
/// message byte it came from.
struct Normalized {
  std::string text;
  std::vector<std::size_t> origin;
  std::size_t source_size = 0;
};

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

std::size_t utf8_length(unsigned char lead) {
  if (lead < 0x80) return 1;
  if ((lead & 0xE0) == 0xC0) return 2;
  if ((lead & 0xF0) == 0xE0) return 3;
  if ((lead & 0xF8) == 0xF0) return 4;
  return 1;
}

Normalized normalize(std::string_view s) {
  Normalized n;
  n.source_size = s.size();
  std::size_t i = 0;
  while (i < s.size()) {
    if (is_space(s[i])) {
      const std::size_t start = i;
      while (i < s.size() && is_space(s[i])) ++i;
      n.text.push_back(' ');
      n.origin.push_back(start);
      continue;
    }
    const std::size_t len = std::min(utf8_length(static_cast<unsigned char>(s[i])),
                                     s.size() - i);
    const std::string folded = text::casefold(s.substr(i, len));
    for (char c : folded) {
      n.text.push_back(c);
      n.origin.push_back(i);
    }
    i += len;
  }
  return n;
}

std::string normalize_phrase(std::string_view phrase) {
  return normalize(text::trim(phrase)).text;
}

/// Message byte just past normalized position `end` (exclusive).
std::size_t origin_end(const Normalized& n, std::size_t end) {
  return end < n.origin.size() ? n.origin[end] : n.source_size;
}

}  // namespace

std::vector<PhraseHit> find_phrases(std::span<const EventRecord> events,
                                    std::span<const std::string> phrases) {
  std::vector<std::string> needles;
  needles.reserve(phrases.size());
  for (const auto& p : phrases) {
    std::string n = normalize_phrase(p);
    if (n.empty()) throw ArgumentError("empty phrase");
    needles.push_back(std::move(n));
  }

  std::vector<PhraseHit> hits;
  for (const auto& e : events) {
    const Normalized msg = normalize(e.message);
    std::vector<PhraseHit> local;
    for (std::size_t p = 0; p < needles.size(); ++p) {
      const std::string& needle = needles[p];
      std::size_t pos = msg.text.find(needle);
      while (pos != std::string::npos) {
        const std::size_t start = msg.origin[pos];
        const std::size_t end = origin_end(msg, pos + needle.size());
        local.push_back({phrases[p], e.seq, start, end - start});
        pos = msg.text.find(needle, pos + 1);
      }
    }
    std::stable_sort(local.begin(), local.end(),
                     [](const PhraseHit& a, const PhraseHit& b) {
                       return a.offset < b.offset;
                     });
    hits.insert(hits.end(), local.begin(), local.end());
  }
  return hits;
}

bool phrase_at(std::string_view message, std::size_t offset,
               std::size_t length, std::string_view phrase) {
  if (offset > message.size() || length > message.size() - offset) {
    return false;
  }
  return normalize(message.substr(offset, length)).text ==
         normalize_phrase(phrase);
}

WordTable negation_scan(std::span<const EventRecord> events) {
  WordTable table;
  for (const auto& e : events) {
    ++table.events;
    const TokenSeq tokens = tokenize(e.message);
    std::unordered_set<std::string> seen;
    for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
      if (text::casefold(tokens[i].text) != "not") continue;
      std::string bigram = "not " + text::casefold(tokens[i + 1].text);
      const bool first = seen.insert(bigram).second;
      table.add(bigram, first);
    }
  }
  return table;
}

std::vector<std::string> KeywordOptions::default_stopwords() {
  return {"a",     "an",    "the",    "of",     "to",      "in",
          "on",    "at",    "for",    "from",   "by",      "with",
          "into",  "onto",  "over",   "under",  "about",   "as",
          "after", "before", "between", "through", "during", "without",
          "within", "via",   "per",    "up",     "down",    "off",
          "out",   "upon",  "w",      "z",      "na",      "do",
          "od",    "przez", "dla",    "po",     "przy",    "ze"};
}

WordTable flagged_word_table(std::span<const EventRecord> events,
                             const RuleSet& rules) {
  std::vector<EventRecord> flagged;
  for (const auto& e : events) {
    const auto match = classify(e, rules);
    if (match && match->category != Category::Info) flagged.push_back(e);
  }
  return word_frequencies(flagged);
}

std::vector<Keyword> suggest_keywords(const WordTable& table,
                                      const WordTable* flagged,
                                      const KeywordOptions& opts) {
  if (table.counts.empty()) throw ArgumentError("empty word table");
  const std::set<std::string> stop(opts.stopwords.begin(), opts.stopwords.end());

  std::vector<Keyword> out;
  for (const auto& [word, count] : table.counts) {
    if (stop.contains(word)) continue;
    const auto ev = table.event_counts.find(word);
    const std::size_t in_events = ev == table.event_counts.end() ? 0 : ev->second;
    if (table.events > 0 &&
        static_cast<double>(in_events) >
            opts.ubiquity_cutoff * static_cast<double>(table.events)) {
      continue;
    }
    Keyword k{word, count, static_cast<double>(count)};
    if (flagged && flagged->events > 0 && table.events > 0 && in_events > 0) {
      const auto fe = flagged->event_counts.find(word);
      const double flagged_rate =
          fe == flagged->event_counts.end()
              ? 0.0
              : static_cast<double>(fe->second) /
                    static_cast<double>(flagged->events);
      const double corpus_rate =
          static_cast<double>(in_events) / static_cast<double>(table.events);
      const double ratio = flagged_rate / corpus_rate;
      if (ratio > 1.0) k.score *= ratio;
    }
    out.push_back(std::move(k));
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const Keyword& a, const Keyword& b) {
                     return a.score > b.score;
                   });
  return out;
}

}  // namespace logmorph
