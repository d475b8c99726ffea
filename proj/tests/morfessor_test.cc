#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <sstream>

#include "subtok/corpus.h"
#include "subtok/error.h"
#include "subtok/morfessor.h"
#include "subtok/utf8.h"
#include "oracles.h"

namespace subtok {
namespace {

using oracle::Dict;
using oracle::Lex;
using oracle::vocab_of;

TEST(Morfessor, CostFunctionMatchesReference) {
  const Lex lex = {{"walk", 20}, {"ed", 5}, {"ing", 5}};
  EXPECT_NEAR(morf_cost(lex, 1.0), oracle::morf_cost(lex, 1.0), 1e-9);
  EXPECT_NEAR(morf_cost(lex, 0.3), oracle::morf_cost(lex, 0.3), 1e-9);
}

TEST(Morfessor, WalkFamilyMatchesExhaustiveMinimum) {
  const Dict dict = {{"walk", 10}, {"walked", 5}, {"walking", 5}};
  const oracle::MorfBest best = oracle::exhaustive_morf(dict, 1.0);
  const MorfModel m = learn_morfessor_lite(vocab_of(dict), {});
  for (std::size_t i = 0; i < dict.size(); ++i) {
    EXPECT_EQ(m.analyses.at(dict[i].first), best.analyses[i]) << dict[i].first;
  }
  EXPECT_NEAR(m.corpus_cost, best.cost, 1e-9);
}

TEST(Morfessor, SmallDictionariesReachExhaustiveCostOrNearIt) {
  std::mt19937 rng(17);
  int exact = 0;
  const int trials = 20;
  for (int t = 0; t < trials; ++t) {
    std::map<std::string, std::int64_t> d;
    while (d.size() < 3) d[testing::random_word(rng, 2, 5)] = 1 + rng() % 12;
    const Dict dict(d.begin(), d.end());
    const oracle::MorfBest best = oracle::exhaustive_morf(dict, 1.0);
    const MorfModel m = learn_morfessor_lite(vocab_of(dict), {});
    EXPECT_GE(m.corpus_cost, best.cost - 1e-9);
    if (m.corpus_cost <= best.cost + 1e-9) ++exact;
  }
  // Greedy search is not guaranteed optimal, but should usually be.
  EXPECT_GE(exact, trials * 3 / 4);
}

TEST(Morfessor, CostNeverIncreasesAcrossPasses) {
  std::mt19937 rng(5);
  for (int t = 0; t < 10; ++t) {
    std::map<std::string, std::int64_t> d;
    const std::size_t n = 5 + rng() % 60;
    while (d.size() < n) d[testing::random_word(rng, 1, 10)] = 1 + rng() % 40;
    const MorfModel m = learn_morfessor_lite(vocab_of(Dict(d.begin(), d.end())), {});
    ASSERT_GE(m.cost_trace.size(), 2u);
    for (std::size_t i = 1; i < m.cost_trace.size(); ++i) {
      EXPECT_LE(m.cost_trace[i], m.cost_trace[i - 1] + 1e-9) << "vocab " << t;
    }
    EXPECT_NEAR(m.corpus_cost, oracle::morf_cost(m.morph_lexicon, 1.0), 1e-6);
  }
}

TEST(Morfessor, AnalysesConcatenateToWord) {
  std::mt19937 rng(21);
  std::map<std::string, std::int64_t> d;
  while (d.size() < 40) d[testing::random_word(rng, 1, 8)] = 1 + rng() % 20;
  const MorfModel m = learn_morfessor_lite(vocab_of(Dict(d.begin(), d.end())), {});
  for (const auto& [w, parts] : m.analyses) {
    std::string joined;
    for (const auto& p : parts) joined += p;
    EXPECT_EQ(joined, w);
  }
  for (int i = 0; i < 100; ++i) {
    const std::string w = testing::random_word(rng, 1, 10);
    std::string joined;
    for (const auto& p : apply_morfessor(m, w)) joined += p;
    EXPECT_EQ(joined, w);
  }
}

TEST(Morfessor, ReloadedModelSegmentsIdentically) {
  const Dict dict = {{"walk", 10}, {"walked", 5}, {"walking", 5}, {"talked", 4},
                     {"talking", 3}, {"jumped", 2}};
  const MorfModel m = learn_morfessor_lite(vocab_of(dict), {});
  std::stringstream ss;
  write_morf(m, ss);
  const MorfModel back = read_morf(ss);
  EXPECT_EQ(back.morph_lexicon, m.morph_lexicon);
  for (const char* w : {"walk", "walked", "talking", "jumping", "xyz", ""}) {
    EXPECT_EQ(apply_morfessor(back, w), apply_morfessor(m, w)) << w;
  }
}

TEST(Morfessor, UnknownCharactersBecomeSingletons) {
  const MorfModel m = learn_morfessor_lite(vocab_of({{"ab", 3}}), {});
  EXPECT_EQ(apply_morfessor(m, "xy"), (std::vector<std::string>{"x", "y"}));
}

}  // namespace
}  // namespace subtok
