#include "logmorph/error.hpp"
#include "logmorph/text_stats.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace logmorph;

namespace {

std::vector<EventRecord> corpus(std::initializer_list<const char*> msgs) {
  std::vector<EventRecord> out;
  for (const char* m : msgs) out.push_back(oracle::event(m));
  return oracle::number(out);
}

}  // namespace

TEST(Words, Examples) {
  const auto t = word_frequencies(corpus({"Error error", "update"}));
  EXPECT_EQ(t.total, 3u);
  EXPECT_EQ(t.distinct(), 2u);
  EXPECT_EQ(t.count("error"), 2u);
  EXPECT_EQ(t.count("update"), 1u);
  const auto empty = word_frequencies({});
  EXPECT_EQ(empty.total, 0u);
  EXPECT_EQ(empty.distinct(), 0u);
}

TEST(Words, RankedOrder) {
  const auto t = word_frequencies(corpus({"b a c", "a b", "a"}));
  const auto r = t.ranked();
  ASSERT_EQ(r.size(), 3u);
  EXPECT_EQ(r[0].word, "a");
  EXPECT_EQ(r[1].word, "b");
  EXPECT_EQ(r[2].word, "c");
}

TEST(Words, NoMaskingApplied) {
  const auto t = word_frequencies(corpus({"pid 812 at 10:22:01"}));
  EXPECT_EQ(t.count("812"), 1u);
  EXPECT_EQ(t.count("10:22:01"), 1u);
}

TEST(Words, AgreesWithBruteForceCounter) {
  oracle::Rng rng(31);
  const std::vector<std::string> vocab{"Error", "update", "not", "able", "User",
                                       "błąd", "zapis,", "Disk.", "the", "x;"};
  for (int round = 0; round < 30; ++round) {
    std::vector<std::string> msgs;
    std::vector<EventRecord> events;
    const std::size_t n = oracle::uniform(rng, 0, 60);
    for (std::size_t i = 0; i < n; ++i) {
      std::string m;
      const std::size_t len = oracle::uniform(rng, 0, 8);
      for (std::size_t j = 0; j < len; ++j) {
        m += vocab[oracle::uniform(rng, 0, vocab.size() - 1)];
        m += oracle::uniform(rng, 0, 3) == 0 ? "  " : " ";
      }
      msgs.push_back(m);
      events.push_back(oracle::event(m));
    }
    const auto table = word_frequencies(oracle::number(events));
    const auto truth = oracle::count_words(msgs);
    EXPECT_EQ(table.counts, truth);
    std::size_t sum = 0;
    for (const auto& [w, c] : table.counts) sum += c;
    EXPECT_EQ(sum, table.total);
  }
}

TEST(Phrases, Examples) {
  const auto hits =
      find_phrases(corpus({"server not able to start"}),
                   std::vector<std::string>{"not able", "no user action is required"});
  ASSERT_EQ(hits.size(), 1u);
  EXPECT_EQ(hits[0].offset, 7u);
  EXPECT_EQ(hits[0].length, 8u);
  EXPECT_EQ(hits[0].seq, 1u);

  const auto overlap = find_phrases(corpus({"aaa"}), std::vector<std::string>{"aa"});
  ASSERT_EQ(overlap.size(), 2u);
  EXPECT_EQ(overlap[0].offset, 0u);
  EXPECT_EQ(overlap[1].offset, 1u);

  EXPECT_THROW(find_phrases(corpus({"x"}), std::vector<std::string>{"  "}),
               ArgumentError);
}

TEST(Phrases, CaseAndWhitespaceInsensitive) {
  const auto events = corpus({"Device NOT\t  Able to sync"});
  const auto hits = find_phrases(events, std::vector<std::string>{"not able"});
  ASSERT_EQ(hits.size(), 1u);
  EXPECT_EQ(events[0].message.substr(hits[0].offset, hits[0].length), "NOT\t  Able");
  EXPECT_TRUE(phrase_at(events[0].message, hits[0].offset, hits[0].length, "not able"));
}

TEST(Phrases, HitsRecheckAtOffsets) {
  oracle::Rng rng(8);
  const std::vector<std::string> parts{"not", "Not", "able", "no", "user",
                                       "action", "is", "required", "ok"};
  const std::vector<std::string> phrases{"not able", "no user action is required"};
  for (int round = 0; round < 200; ++round) {
    std::string m;
    const std::size_t len = oracle::uniform(rng, 0, 12);
    for (std::size_t j = 0; j < len; ++j) {
      m += parts[oracle::uniform(rng, 0, parts.size() - 1)] + " ";
    }
    const auto events = corpus({m.c_str()});
    for (const auto& h : find_phrases(events, phrases)) {
      EXPECT_TRUE(phrase_at(m, h.offset, h.length, h.phrase));
    }
  }
}

TEST(Negation, Examples) {
  const auto t = negation_scan(corpus({"not able to run, not able"}));
  EXPECT_EQ(t.count("not able"), 2u);
  EXPECT_EQ(t.distinct(), 1u);
  EXPECT_EQ(negation_scan(corpus({"all fine"})).distinct(), 0u);
  EXPECT_EQ(negation_scan(corpus({"Not Capable"})).count("not capable"), 1u);
}

TEST(Negation, BoundedByNotCount) {
  const auto events = corpus({"not not able", "not", "x not y not"});
  EXPECT_LE(negation_scan(events).total, word_frequencies(events).count("not"));
}

TEST(Keywords, SkewedFrequencyTable) {
  WordTable t;
  t.events = 100;
  t.counts = {{"error", 26000}, {"update", 11000}, {"the", 40000}};
  t.event_counts = {{"error", 30}, {"update", 20}, {"the", 60}};
  t.total = 77000;
  KeywordOptions opts;
  opts.stopwords.clear();  // rely on the ubiquity cutoff alone
  const auto k = suggest_keywords(t, nullptr, opts);
  ASSERT_EQ(k.size(), 2u);
  EXPECT_EQ(k[0].word, "error");
  EXPECT_EQ(k[1].word, "update");
}

TEST(Keywords, EdgeCases) {
  // one word, present in exactly half the events: at the cutoff, kept
  const auto single = suggest_keywords(word_frequencies(corpus({"alpha", ""})));
  ASSERT_EQ(single.size(), 1u);
  EXPECT_EQ(single[0].word, "alpha");
  const auto ubiquitous = suggest_keywords(word_frequencies(corpus({"a b", "a b"})));
  EXPECT_TRUE(ubiquitous.empty());
  EXPECT_THROW(suggest_keywords(WordTable{}), ArgumentError);
}

TEST(Keywords, FlaggedWordsBoosted) {
  std::istringstream rules_text("bad\tcritical\t-\t-\tfailed\n");
  const RuleSet rules = parse_rules(rules_text);
  std::vector<EventRecord> events;
  for (int i = 0; i < 6; ++i) events.push_back(oracle::event("routine check ok"));
  for (int i = 0; i < 2; ++i) events.push_back(oracle::event("write failed"));
  for (int i = 0; i < 2; ++i) events.push_back(oracle::event("read failed"));
  events.push_back(oracle::event("write ok"));
  events = oracle::number(events);
  const auto table = word_frequencies(events);
  const auto flagged = flagged_word_table(events, rules);
  EXPECT_EQ(flagged.events, 4u);
  KeywordOptions opts;
  opts.ubiquity_cutoff = 1.0;
  const auto plain = suggest_keywords(table, nullptr, opts);
  const auto boosted = suggest_keywords(table, &flagged, opts);
  EXPECT_NE(plain[0].word, "failed");
  EXPECT_EQ(boosted[0].word, "failed");
}
