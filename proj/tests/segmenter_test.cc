#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "subtok/corpus.h"
#include "subtok/error.h"
#include "subtok/segmenter.h"
#include "test_util.h"

namespace subtok {
namespace {

Vocab small_vocab() {
  return Vocab::build(
      tokenize_corpus("walk walked walking talk talked talking walk walk\n"), 1);
}

TEST(Segmenter, KindNamesRoundTrip) {
  for (auto k : {SegmenterKind::kMorf, SegmenterKind::kBpe,
                 SegmenterKind::kCharNgram, SegmenterKind::kWord}) {
    EXPECT_EQ(parse_segmenter_kind(to_string(k)), k);
  }
  EXPECT_THROW(parse_segmenter_kind("bytes"), Error);
}

TEST(Segmenter, WordTokenIsAppendedLast) {
  const Segmenter seg(CharNgramRange{3, 3});
  const Segmentation s = seg.segment("cat", true);
  EXPECT_EQ(s.subwords, (std::vector<std::string>{"<ca", "cat", "at>", "cat"}));
  EXPECT_TRUE(s.includes_word_token);
  EXPECT_EQ(s.subword_count(), 3u);
  EXPECT_EQ(seg.segment("cat", false).subword_count(), 3u);
}

TEST(Segmenter, WholeWordYieldsTheWord) {
  const Segmenter seg(WholeWord{});
  EXPECT_EQ(seg.split("naïve"), (std::vector<std::string>{"naïve"}));
}

TEST(Segmenter, EmptyWordIsRejected) {
  EXPECT_THROW(Segmenter(WholeWord{}).split(""), Error);
}

TEST(Segmenter, SaveLoadEveryKind) {
  testing::TempDir dir;
  const Vocab v = small_vocab();
  std::vector<Segmenter> segs = {
      Segmenter(learn_morfessor_lite(v, {})), Segmenter(learn_bpe(v, 20)),
      Segmenter(CharNgramRange{2, 4}), Segmenter(WholeWord{})};
  for (const Segmenter& s : segs) {
    const auto path = dir / std::string(to_string(s.kind()));
    s.save(path);
    const Segmenter back = Segmenter::load(s.kind(), path);
    for (const char* w : {"walked", "talking", "jumps", "x"}) {
      EXPECT_EQ(back.split(w), s.split(w)) << to_string(s.kind()) << " " << w;
    }
  }
}

TEST(Segmenter, LoadingWithWrongKindFails) {
  std::stringstream ss("#word v1\n");
  EXPECT_THROW(Segmenter::read(SegmenterKind::kCharNgram, ss), FormatError);
}

TEST(SubwordVocab, KeySpacesAreDisjoint) {
  SubwordVocab sv;
  const SubwordId a = sv.add(KeySpace::kSubword, "cat");
  const SubwordId b = sv.add(KeySpace::kWordToken, "cat");
  EXPECT_NE(a, b);
  EXPECT_EQ(sv.add(KeySpace::kSubword, "cat"), a);
  EXPECT_EQ(sv.id(KeySpace::kWordToken, "cat"), b);
  EXPECT_EQ(sv.id(KeySpace::kWordToken, "dog"), kNoSubword);
  EXPECT_EQ(sv.size(), 2u);
}

TEST(SubwordVocab, LookupUsesWordTokenSpaceForLastElement) {
  SubwordVocab sv;
  sv.add(KeySpace::kSubword, "cat");
  Segmentation seg{"cat", {"cat", "cat"}, true};
  auto ids = sv.lookup(seg);
  EXPECT_EQ(ids[0], 0);
  EXPECT_EQ(ids[1], kNoSubword);
}

TEST(SubwordVocab, BuildCoversVocabularyAndRoundTrips) {
  const Vocab v = small_vocab();
  const Segmenter seg(CharNgramRange{3, 6});
  const SubwordVocab sv = build_subword_vocab(v, seg, true);
  std::set<std::pair<KeySpace, std::string>> expected;
  for (const auto& w : v.words()) {
    for (const auto& g : seg.split(w)) expected.insert({KeySpace::kSubword, g});
    expected.insert({KeySpace::kWordToken, w});
  }
  EXPECT_EQ(sv.size(), expected.size());
  for (const auto& [space, text] : expected) EXPECT_NE(sv.id(space, text), kNoSubword);

  std::stringstream ss;
  sv.write_tsv(ss);
  EXPECT_EQ(SubwordVocab::read_tsv(ss), sv);
}

}  // namespace
}  // namespace subtok
