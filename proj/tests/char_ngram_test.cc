#include <gtest/gtest.h>

#include <random>

#include "subtok/char_ngram.h"
#include "subtok/utf8.h"
#include "oracles.h"

namespace subtok {
namespace {

TEST(CharNgram, WhereExample) {
  const auto g = char_ngrams("where", 3, 3);
  EXPECT_EQ(g, (std::vector<std::string>{"<wh", "whe", "her", "ere", "re>"}));
}

TEST(CharNgram, ShortWordYieldsOnlyWrapped) {
  EXPECT_EQ(char_ngrams("a", 3, 6), (std::vector<std::string>{"<a>"}));
  EXPECT_TRUE(char_ngrams("", 3, 6).empty());
}

TEST(CharNgram, CountsCodePointsNotBytes) {
  const auto g = char_ngrams("\xC3\xA9t\xC3\xA9", 5, 5);
  EXPECT_EQ(g, (std::vector<std::string>{"<\xC3\xA9t\xC3\xA9>"}));
}

TEST(CharNgram, MatchesSubstringEnumeration) {
  std::mt19937 rng(1234);
  for (int i = 0; i < 1000; ++i) {
    const std::string w = testing::random_word(rng, 1, 12);
    ASSERT_EQ(char_ngrams(w, 3, 6), oracle::substrings(w, 3, 6)) << w;
  }
}

TEST(CharNgram, CountFormula) {
  std::mt19937 rng(99);
  for (int i = 0; i < 200; ++i) {
    const std::string w = testing::random_word(rng, 0, 15);
    const int len = static_cast<int>(utf8::length(w)) + 2;
    std::size_t expected = 0;
    for (int n = 2; n <= 4; ++n) expected += len >= n ? len - n + 1 : 0;
    EXPECT_EQ(char_ngrams(w, 2, 4).size(), expected);
  }
}

}  // namespace
}  // namespace subtok
