#pragma once

// Brute-force reference implementations and seeded generators shared by the
// unit and acceptance tests. Nothing here calls into the code under test.

#include "logmorph/event.hpp"

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <map>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace oracle {

using Rng = std::mt19937_64;

inline logmorph::Timestamp at_second(std::int64_t s) {
  return logmorph::Timestamp(std::chrono::seconds(1'600'000'000 + s));
}

inline logmorph::EventRecord event(std::string message,
                                   std::int64_t second = 0,
                                   std::string host = "node1") {
  logmorph::EventRecord e;
  e.occurred_at = at_second(second);
  e.host = std::move(host);
  e.severity = logmorph::Severity::Info;
  e.raw = message;
  e.message = std::move(message);
  return e;
}

/// Assigns seq 1..N in order.
inline std::vector<logmorph::EventRecord> number(
    std::vector<logmorph::EventRecord> events) {
  std::uint64_t seq = 1;
  for (auto& e : events) e.seq = seq++;
  return events;
}

inline std::string random_word(Rng& rng, std::size_t len) {
  static constexpr char kLetters[] = "abcdefghijklmnopqrstuvwxyz";
  std::uniform_int_distribution<int> pick(0, 25);
  std::string s;
  for (std::size_t i = 0; i < len; ++i) s.push_back(kLetters[pick(rng)]);
  return s;
}

inline std::size_t uniform(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

// ---------------------------------------------------------------- words

inline bool ascii_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

/// Whitespace split, trailing ",.;:" stripped, ASCII-lowercased. Valid for
/// corpora whose only uppercase letters are ASCII.
inline std::map<std::string, std::size_t> count_words(
    const std::vector<std::string>& messages) {
  std::map<std::string, std::size_t> counts;
  for (const auto& m : messages) {
    std::string cur;
    auto flush = [&] {
      while (!cur.empty() && (cur.back() == ',' || cur.back() == '.' ||
                              cur.back() == ';' || cur.back() == ':')) {
        cur.pop_back();
      }
      if (!cur.empty()) ++counts[cur];
      cur.clear();
    };
    for (char c : m) {
      if (ascii_space(c)) {
        flush();
      } else {
        cur.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a')
                                           : c);
      }
    }
    flush();
  }
  return counts;
}

// ---------------------------------------------------------------- sequences

using PairKey = std::pair<std::string, std::string>;

struct PairTruth {
  std::map<PairKey, std::size_t> pair_count;
  std::map<std::string, std::size_t> antecedent_total;
};

/// Enumerates every index i, i+1 of each stream.
inline PairTruth enumerate_pairs(
    const std::vector<std::vector<std::string>>& streams) {
  PairTruth t;
  for (const auto& s : streams) {
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
      ++t.pair_count[{s[i], s[i + 1]}];
      ++t.antecedent_total[s[i]];
    }
  }
  return t;
}

/// Counts every window of length n at every start index.
inline std::map<std::vector<std::string>, std::size_t> enumerate_ngrams(
    const std::vector<std::vector<std::string>>& streams, std::size_t n) {
  std::map<std::vector<std::string>, std::size_t> out;
  for (const auto& s : streams) {
    if (s.size() < n) continue;
    for (std::size_t i = 0; i + n <= s.size(); ++i) {
      ++out[std::vector<std::string>(s.begin() + static_cast<long>(i),
                                     s.begin() + static_cast<long>(i + n))];
    }
  }
  return out;
}

// ---------------------------------------------------------------- distance

/// Full-table Levenshtein over arbitrary comparable items.
template <class T, class Eq>
std::size_t edit_distance(const std::vector<T>& a, const std::vector<T>& b,
                          Eq eq) {
  std::vector<std::vector<std::size_t>> d(a.size() + 1,
                                          std::vector<std::size_t>(b.size() + 1));
  for (std::size_t i = 0; i <= a.size(); ++i) d[i][0] = i;
  for (std::size_t j = 0; j <= b.size(); ++j) d[0][j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1,
                          d[i - 1][j - 1] + (eq(a[i - 1], b[j - 1]) ? 0 : 1)});
    }
  }
  return d[a.size()][b.size()];
}

// ---------------------------------------------------------------- skeletons

/// Replaces every occurrence of each `fields[i].first` with `fields[i].second`.
inline std::string substitute(
    std::string s, const std::vector<std::pair<std::string, std::string>>& fields) {
  for (const auto& [from, to] : fields) {
    std::size_t pos = 0;
    while ((pos = s.find(from, pos)) != std::string::npos) {
      s.replace(pos, from.size(), to);
      pos += to.size();
    }
  }
  return s;
}

struct MaskingCorpus {
  std::vector<std::string> messages;
  /// Per message: the exact timestamp and pid text that was planted.
  std::vector<std::vector<std::pair<std::string, std::string>>> planted;
};

inline std::string clock_text(Rng& rng) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%02zu:%02zu:%02zu", uniform(rng, 0, 23),
                uniform(rng, 0, 59), uniform(rng, 0, 59));
  return buf;
}

/// `skeletons` distinct bodies, each emitted `variants` times with a
/// different clock time and pid. Skeleton words never contain digits, so the
/// planted fields are the only digit-bearing tokens.
inline MaskingCorpus masking_corpus(std::size_t skeletons, std::size_t variants,
                                    std::uint64_t seed) {
  Rng rng(seed);
  MaskingCorpus c;
  std::set<std::string> bodies;
  while (bodies.size() < skeletons) {
    bodies.insert(random_word(rng, 6) + " " + random_word(rng, 5) + " " +
                  random_word(rng, 7));
  }
  for (const auto& body : bodies) {
    std::set<std::pair<std::string, std::string>> used;
    while (used.size() < variants) {
      used.insert({clock_text(rng), std::to_string(uniform(rng, 100, 99999))});
    }
    for (const auto& [ts, pid] : used) {
      c.messages.push_back(body + " at " + ts + " pid " + pid);
      c.planted.push_back({{ts, "*"}, {pid, "(...)"}});
    }
  }
  return c;
}

// ---------------------------------------------------------------- templates

struct LabeledCorpus {
  std::vector<logmorph::EventRecord> events;  // seq 1..N
  std::vector<std::size_t> labels;            // generating skeleton per event
  std::vector<std::string> skeletons;         // "{}" marks a parameter
};

/// Messages from fixed skeletons; each "{}" becomes a fresh random token
/// (a long random word or a number). Skeleton order is shuffled per event.
inline LabeledCorpus labeled_corpus(std::size_t n, std::uint64_t seed) {
  LabeledCorpus c;
  c.skeletons = {
      "session opened for user {} by {}",
      "session closed for user {}",
      "Accepted password for {} from {} port {} ssh2",
      "Failed password for invalid user {} from {}",
      "connection from {} refused",
      "disk {} is {} percent full",
      "service {} started in {} ms",
      "service {} stopped",
      "kernel: usb device {} disconnected",
      "job {} completed with status {}",
      "backup of volume {} finished",
      "cron: ({}) CMD ({})",
  };
  Rng rng(seed);
  std::uint64_t seq = 1;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t label = uniform(rng, 0, c.skeletons.size() - 1);
    const std::string& sk = c.skeletons[label];
    std::string msg;
    std::size_t pos = 0;
    while (true) {
      const auto hole = sk.find("{}", pos);
      msg += sk.substr(pos, hole - pos);
      if (hole == std::string::npos) break;
      if (uniform(rng, 0, 1) == 0) {
        msg += std::to_string(uniform(rng, 0, 9'999'999));
      } else {
        msg += "x" + random_word(rng, 9);
      }
      pos = hole + 2;
    }
    auto e = event(msg, static_cast<std::int64_t>(i));
    e.seq = seq++;
    c.events.push_back(std::move(e));
    c.labels.push_back(label);
  }
  return c;
}

}  // namespace oracle
