#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <sstream>

#include "subtok/corpus.h"
#include "subtok/error.h"
#include "subtok/model.h"
#include "test_util.h"

namespace subtok {
namespace {

const char* kText =
    "the walker walked to the walking path\n"
    "a talker talked while walking\n"
    "the path was long and the walk was longer\n";

EmbeddingModel make_model(ModelConfig c) {
  Vocab v = Vocab::build(tokenize_corpus(kText), 1);
  Segmenter seg = make_segmenter(c, v);
  return EmbeddingModel::create(c, std::move(v), std::move(seg));
}

TEST(ModelConfig, LabelsFollowTableNames) {
  ModelConfig c;
  c.segmenter = SegmenterKind::kCharNgram;
  c.word_token = true;
  c.position = false;
  EXPECT_EQ(c.label(), "charn/w+/p-/add");
  c.segmenter = SegmenterKind::kBpe;
  c.merges = 10'000;
  EXPECT_EQ(c.segmenter_label(), "bpe1e4");
  c.merges = 1'000;
  EXPECT_EQ(c.segmenter_label(), "bpe1e3");
  c.merges = 100'000;
  EXPECT_EQ(c.segmenter_label(), "bpe1e5");
  c.merges = 2'500;
  EXPECT_EQ(c.segmenter_label(), "bpe2500");
}

TEST(ModelConfig, FromLabelInvertsLabel) {
  for (const char* l : {"charn/w+/p-/add", "bpe1e4/w-/p+/add", "bpe1e3/w+/p+/add",
                        "bpe777/w-/p-/add", "morf/w-/p+/add", "word/w-/p-/add"}) {
    EXPECT_EQ(ModelConfig::from_label(l).label(), l);
  }
  EXPECT_EQ(ModelConfig::from_label("w2v").label(), "word/w-/p-/add");
  EXPECT_EQ(ModelConfig::from_label("ft").label(), "charn/w+/p-/add");
  EXPECT_EQ(ModelConfig::from_label("morf/p+").label(), "morf/w-/p+/add");
  EXPECT_THROW(ModelConfig::from_label("charn/q+"), Error);
  EXPECT_THROW(ModelConfig::from_label("bpeXL"), Error);
}

TEST(ModelConfig, KeyValueRoundTrip) {
  ModelConfig c = ModelConfig::from_label("bpe1e3/w+/p+/add");
  c.dim = 17;
  c.seed = 99;
  const ModelConfig back = ModelConfig::from_key_values(c.to_key_values());
  EXPECT_EQ(back.label(), c.label());
  EXPECT_EQ(back.dim, 17);
  EXPECT_EQ(back.seed, 99u);
}

TEST(ModelConfig, RejectsInvalidValues) {
  ModelConfig c;
  c.dim = 0;
  EXPECT_THROW(c.validate(), Error);
  c = ModelConfig{};
  c.ngram_min = 5;
  c.ngram_max = 4;
  EXPECT_THROW(c.validate(), Error);
}

TEST(ComposePlan, PositionsFollowSequenceIndexAndClamp) {
  SubwordVocab sv;
  for (const char* s : {"a", "b", "c", "d"}) sv.add(KeySpace::kSubword, s);
  sv.add(KeySpace::kWordToken, "abzcd");
  ModelConfig c;
  c.position = true;
  c.max_positions = 3;
  const Segmentation seg{"abzcd", {"a", "b", "z", "c", "d", "abzcd"}, true};
  const auto plan = compose_plan(seg, sv, c);
  ASSERT_EQ(plan.size(), 5u);  // "z" is unknown
  EXPECT_EQ(plan[0].position, 0);
  EXPECT_EQ(plan[1].position, 1);
  EXPECT_EQ(plan[2].position, 2);  // index 3 clamped to 2
  EXPECT_EQ(plan[3].position, 2);
  EXPECT_EQ(plan[4].row, sv.id(KeySpace::kWordToken, "abzcd"));
  EXPECT_EQ(plan[4].position, -1);

  c.position = false;
  for (const auto& t : compose_plan(seg, sv, c)) EXPECT_EQ(t.position, -1);
}

TEST(Compose, IsSumOfSubwordAndPositionRows) {
  ModelConfig c = ModelConfig::from_label("charn/w+/p+/add");
  c.dim = 8;
  const EmbeddingModel m = make_model(c);
  const Segmentation seg = m.segmenter().segment("walked", true);
  const auto plan = compose_plan(seg, m.subwords(), c);
  std::vector<double> want(c.dim, 0.0);
  for (const auto& t : plan) {
    for (int k = 0; k < c.dim; ++k) {
      want[k] += m.params().subword.at(t.row, k);
      if (t.position >= 0) want[k] += m.params().position.at(t.position, k);
    }
  }
  const ComposedVector got = m.word_vector("walked");
  EXPECT_FALSE(got.all_unknown);
  for (int k = 0; k < c.dim; ++k) EXPECT_NEAR(got.values[k], want[k], 1e-6);
}

TEST(Compose, UnknownWordWithNoKnownSubwordIsZero) {
  ModelConfig c = ModelConfig::from_label("w2v");
  c.dim = 5;
  const EmbeddingModel m = make_model(c);
  const ComposedVector v = m.word_vector("zebra");
  EXPECT_TRUE(v.all_unknown);
  for (float x : v.values) EXPECT_EQ(x, 0.0f);
}

TEST(Compose, OovWordSharesSubwordsWithKnownWords) {
  ModelConfig c = ModelConfig::from_label("charn/w+/p-/add");
  c.dim = 5;
  const EmbeddingModel m = make_model(c);
  const ComposedVector v = m.word_vector("walks");
  EXPECT_FALSE(v.all_unknown);
  EXPECT_FALSE(m.vocab().contains("walks"));
}

TEST(Init, RangesAndZeroContext) {
  ModelConfig c;
  c.dim = 20;
  const ParamTables p = init_params(c, 50, 30);
  const float bound = 0.5f / 20;
  for (std::size_t r = 0; r < 50; ++r) {
    for (float x : p.subword.row(r)) {
      EXPECT_LE(std::abs(x), bound);
    }
  }
  for (std::size_t r = 0; r < 30; ++r) {
    for (float x : p.context.row(r)) EXPECT_EQ(x, 0.0f);
  }
  EXPECT_EQ(p.position.rows(), static_cast<std::size_t>(c.max_positions));
}

TEST(Checkpoint, ReloadReproducesComposedVectorsBitwise) {
  testing::TempDir dir;
  for (const char* label : {"charn/w+/p+/add", "bpe1e3/w-/p+/add", "morf/w+/p-/add",
                            "w2v"}) {
    ModelConfig c = ModelConfig::from_label(label);
    c.dim = 6;
    c.merges = 30;
    const EmbeddingModel m = make_model(c);
    const auto path = dir / "ckpt";
    std::filesystem::remove_all(path);
    m.save(path);
    const EmbeddingModel back = EmbeddingModel::load(path);
    EXPECT_EQ(back.config().label(), m.config().label());
    EXPECT_EQ(back.vocab(), m.vocab());
    EXPECT_EQ(back.subwords(), m.subwords());
    for (const char* w : {"walked", "talking", "unseen", "pathway"}) {
      const auto a = m.word_vector(w), b = back.word_vector(w);
      ASSERT_EQ(a.values.size(), b.values.size());
      EXPECT_EQ(std::memcmp(a.values.data(), b.values.data(),
                            a.values.size() * sizeof(float)),
                0)
          << label << " " << w;
    }
  }
}

TEST(Checkpoint, MissingDirectoryIsIoError) {
  EXPECT_THROW(EmbeddingModel::load("/nonexistent/model"), IoError);
}

TEST(Matrix, SaveLoadRoundTrip) {
  testing::TempDir dir;
  Matrix m(3, 4);
  for (std::size_t r = 0; r < 3; ++r) {
    for (std::size_t k = 0; k < 4; ++k) m.at(r, k) = static_cast<float>(r * 10 + k) / 7.0f;
  }
  save_matrix(m, dir / "m.bin");
  EXPECT_EQ(load_matrix(dir / "m.bin"), m);
}

TEST(Vectors, ExportImportRoundTrip) {
  ModelConfig c = ModelConfig::from_label("charn/w+/p-/add");
  c.dim = 7;
  const EmbeddingModel m = make_model(c);
  std::stringstream ss;
  export_vectors(m, ss);
  const WordVectors wv = import_vectors(ss);
  ASSERT_EQ(wv.words, m.vocab().words());
  for (std::size_t i = 0; i < wv.words.size(); ++i) {
    const auto v = m.word_vector(wv.words[i]);
    for (int k = 0; k < c.dim; ++k) {
      EXPECT_NEAR(wv.vectors.at(i, k), v.values[k], 1e-5);
    }
  }
}

TEST(Vectors, EmptyVocabularyCannotBeExported) {
  ModelConfig c = ModelConfig::from_label("w2v");
  c.dim = 3;
  ParamTables empty{Matrix(0, 3), Matrix(c.max_positions, 3), Matrix(0, 3)};
  EmbeddingModel m(c, Vocab{}, Segmenter(WholeWord{}), SubwordVocab{},
                   std::move(empty));
  std::stringstream ss;
  EXPECT_THROW(export_vectors(m, ss), EmptyVocabError);
}

TEST(Vectors, MalformedInputHasLineNumber) {
  std::stringstream ss("2 3\na 1 2 3\nb 1 2\n");
  try {
    import_vectors(ss);
    ADD_FAILURE();
  } catch (const FormatError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

}  // namespace
}  // namespace subtok
