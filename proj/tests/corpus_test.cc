#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "subtok/corpus.h"
#include "subtok/error.h"
#include "subtok/random.h"
#include "subtok/utf8.h"
#include "test_util.h"

namespace subtok {
namespace {

TEST(Utf8, SplitsCodePoints) {
  const auto cps = utf8::code_points("a\xC3\xA9\xE4\xB8\xAD\xF0\x9F\x98\x80");
  ASSERT_EQ(cps.size(), 4u);
  EXPECT_EQ(cps[1], "\xC3\xA9");
  EXPECT_EQ(cps[3], "\xF0\x9F\x98\x80");
  EXPECT_EQ(utf8::length("h\xC3\xA9llo"), 5u);
}

TEST(Utf8, RejectsMalformedInputWithOffset) {
  const std::vector<std::pair<std::string, std::size_t>> bad = {
      {"ab\xFF", 2},                 // invalid lead byte
      {"\xC3", 0},                   // truncated
      {"x\xC0\xAF", 1},              // overlong '/'
      {"\xED\xA0\x80", 0},           // surrogate
      {"ok\xE4\xB8", 2},             // truncated 3-byte
      {"\xF4\x90\x80\x80", 0},       // above U+10FFFF
  };
  for (const auto& [text, offset] : bad) {
    try {
      utf8::validate(text);
      ADD_FAILURE() << "accepted invalid input";
    } catch (const DecodeError& e) {
      EXPECT_EQ(e.offset(), offset);
    }
  }
}

TEST(Corpus, TokenizesOnWhitespaceAndSkipsBlankLines) {
  const Corpus c = tokenize_corpus("the cat  sat\n\n  \t\nthe dog\r\n");
  ASSERT_EQ(c.sentences.size(), 2u);
  EXPECT_EQ(c.sentences[0], (Sentence{"the", "cat", "sat"}));
  EXPECT_EQ(c.sentences[1], (Sentence{"the", "dog"}));
  EXPECT_EQ(c.token_count, 5u);
}

TEST(Corpus, InvalidUtf8IsReported) {
  EXPECT_THROW(tokenize_corpus("fine\nbro\xFFken\n"), DecodeError);
}

TEST(Corpus, MissingFileIsIoError) {
  EXPECT_THROW(read_corpus("/nonexistent/corpus.txt"), IoError);
}

TEST(Corpus, SampleTokensTakesExactPrefix) {
  const Corpus c = tokenize_corpus("a b c\nd e\nf g h i\n");
  const Corpus s = sample_tokens(c, 4);
  EXPECT_EQ(s.token_count, 4u);
  ASSERT_EQ(s.sentences.size(), 2u);
  EXPECT_EQ(s.sentences[1], (Sentence{"d"}));
  EXPECT_EQ(sample_tokens(c, 9).token_count, 9u);
  try {
    sample_tokens(c, 10);
    ADD_FAILURE();
  } catch (const InsufficientDataError& e) {
    EXPECT_EQ(e.available(), 9u);
  }
}

TEST(Vocab, CanonicalOrderIsCountThenBytes) {
  const Corpus c = tokenize_corpus("b a c a b a d d\n");
  const Vocab v = Vocab::build(c, 1);
  EXPECT_EQ(v.words(), (std::vector<std::string>{"a", "b", "d", "c"}));
  EXPECT_EQ(v.counts(), (std::vector<std::int64_t>{3, 2, 2, 1}));
  EXPECT_EQ(v.id("d"), 2);
  EXPECT_EQ(v.id("zzz"), kNoWord);
  EXPECT_EQ(v.total_tokens(), 8);
}

TEST(Vocab, MinCountFiltersButKeepsTotal) {
  const Corpus c = tokenize_corpus("b a c a b a d d\n");
  const Vocab v = Vocab::build(c, 2);
  EXPECT_EQ(v.size(), 3u);
  EXPECT_FALSE(v.contains("c"));
  EXPECT_EQ(v.total_tokens(), 8);
  EXPECT_THROW(Vocab::build(c, 4), EmptyVocabError);
}

TEST(Vocab, TsvRoundTrip) {
  std::mt19937 rng(3);
  std::string text;
  for (int i = 0; i < 500; ++i) text += testing::random_word(rng, 1, 4) + " ";
  const Vocab v = Vocab::build(tokenize_corpus(text), 2);
  std::stringstream ss;
  v.write_tsv(ss);
  const Vocab back = Vocab::read_tsv(ss, 2, v.total_tokens());
  EXPECT_EQ(back, v);
  for (std::size_t i = 0; i < v.size(); ++i) {
    EXPECT_EQ(back.id(v.word(i)), static_cast<WordId>(i));
  }
}

TEST(Vocab, MalformedTsvCarriesLineNumber) {
  std::stringstream ss("a\t0\t3\nb\t1\n");
  try {
    Vocab::read_tsv(ss, 1, 0);
    ADD_FAILURE();
  } catch (const FormatError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(Sampling, NegativeWeightsFollowPower) {
  const Vocab v = Vocab::from_counts({{"x", 16}, {"y", 1}}, 1, 17);
  const auto p = negative_sampling_weights(v, 0.75);
  EXPECT_NEAR(p[0], 8.0 / 9.0, 1e-12);
  EXPECT_NEAR(p[1], 1.0 / 9.0, 1e-12);
}

TEST(Sampling, KeepProbabilityFormula) {
  const Vocab v = Vocab::from_counts({{"the", 900}, {"rare", 1}}, 1, 1000);
  const double t = 1e-3;
  const auto keep = subsample_keep_probs(v, t);
  const double f = 0.9;
  EXPECT_NEAR(keep[0], (std::sqrt(f / t) + 1.0) * t / f, 1e-12);
  EXPECT_DOUBLE_EQ(keep[1], 1.0);
}

TEST(DataGroups, MatchTheThreeTriples) {
  EXPECT_EQ(data_group_for(10'000), (DataGroup{GroupLabel::G1, 32, 60, 2}));
  EXPECT_EQ(data_group_for(50'000), (DataGroup{GroupLabel::G1, 32, 60, 2}));
  EXPECT_EQ(data_group_for(50'001), (DataGroup{GroupLabel::G2, 128, 30, 3}));
  EXPECT_EQ(data_group_for(100'000), (DataGroup{GroupLabel::G2, 128, 30, 3}));
  EXPECT_EQ(data_group_for(500'000), (DataGroup{GroupLabel::G2, 128, 30, 3}));
  EXPECT_EQ(data_group_for(500'001), (DataGroup{GroupLabel::G3, 512, 15, 5}));
  EXPECT_EQ(data_group_for(1'000'000), (DataGroup{GroupLabel::G3, 512, 15, 5}));
  EXPECT_EQ(data_group_for(5'000'000).label, GroupLabel::G3);
  EXPECT_EQ(data_group_for(10).label, GroupLabel::G1);
  EXPECT_EQ(data_group_for(50'000'000).label, GroupLabel::G3);
}

TEST(DataGroups, MonotoneInSize) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 1000; ++i) {
    const std::size_t a = rng() % 6'000'000, b = rng() % 6'000'000;
    const auto ga = data_group_for(std::min(a, b)).label;
    const auto gb = data_group_for(std::max(a, b)).label;
    EXPECT_LE(static_cast<int>(ga), static_cast<int>(gb));
  }
}

TEST(Rng, BelowIsInRangeAndSeeded) {
  Rng a(42), b(42);
  for (int i = 0; i < 1000; ++i) {
    const auto x = a.below(7);
    EXPECT_LT(x, 7u);
    EXPECT_EQ(x, b.below(7));
  }
}

TEST(Rng, DiscreteSamplerMatchesProbabilities) {
  const std::vector<double> p = {0.5, 0.25, 0.0, 0.25};
  DiscreteSampler s(p);
  Rng rng(9);
  std::vector<int> hits(4, 0);
  const int n = 200'000;
  for (int i = 0; i < n; ++i) ++hits[s.sample(rng)];
  EXPECT_EQ(hits[2], 0);
  for (int k : {0, 1, 3}) EXPECT_NEAR(hits[k] / double(n), p[k], 0.01);
}

}  // namespace
}  // namespace subtok
