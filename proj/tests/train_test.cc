#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "subtok/corpus.h"
#include "subtok/error.h"
#include "subtok/model.h"
#include "subtok/sgns.h"
#include "subtok/synthetic.h"
#include "subtok/train.h"

namespace subtok {
namespace {

const char* kText =
    "the walker walked to the walking path\n"
    "a talker talked while walking\n"
    "the path was long and the walk was longer\n"
    "walkers walk and talkers talk\n";

EmbeddingModel make_model(const std::string& label, int dim = 8) {
  ModelConfig c = ModelConfig::from_label(label);
  c.dim = dim;
  Vocab v = Vocab::build(tokenize_corpus(kText), 1);
  Segmenter seg = make_segmenter(c, v);
  return EmbeddingModel::create(c, std::move(v), std::move(seg));
}

void randomize_context(EmbeddingModel& m, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> u(-0.5f, 0.5f);
  Matrix& ctx = m.params().context;
  for (std::size_t r = 0; r < ctx.rows(); ++r) {
    for (float& x : ctx.row(r)) x = u(rng);
  }
}

std::set<std::size_t> changed_rows(const Matrix& a, const Matrix& b) {
  std::set<std::size_t> rows;
  for (std::size_t r = 0; r < a.rows(); ++r) {
    if (std::memcmp(a.row(r).data(), b.row(r).data(), a.cols() * sizeof(float)) != 0) {
      rows.insert(r);
    }
  }
  return rows;
}

TrainConfig quiet_config() {
  TrainConfig t;
  t.negatives = 3;
  t.lr_start = 0.1;
  return t;
}

TEST(Sgns, ClampAndLossHelpers) {
  EXPECT_EQ(clamp_dot(100.0), kDotClamp);
  EXPECT_EQ(clamp_dot(-100.0), -kDotClamp);
  EXPECT_NEAR(neg_log_sigmoid(0.0), std::log(2.0), 1e-12);
  EXPECT_TRUE(std::isfinite(neg_log_sigmoid(-1e6)));
}

TEST(Locality, WholeWordUpdatesOneInputRow) {
  EmbeddingModel m = make_model("w2v");
  randomize_context(m, 1);
  const ParamTables before = m.params();
  SgnsTrainer trainer(m, quiet_config(), 3);
  const WordId center = m.vocab().id("walked");
  const WordId ctx = m.vocab().id("path");
  const std::vector<WordId> negs = {m.vocab().id("the"), m.vocab().id("talk")};
  trainer.accumulate(center, ctx, negs);
  trainer.apply();
  const auto rows = changed_rows(before.subword, m.params().subword);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(*rows.begin(),
            static_cast<std::size_t>(m.subwords().id(KeySpace::kSubword, "walked")));
  EXPECT_EQ(changed_rows(before.context, m.params().context),
            (std::set<std::size_t>{static_cast<std::size_t>(ctx),
                                   static_cast<std::size_t>(negs[0]),
                                   static_cast<std::size_t>(negs[1])}));
  EXPECT_TRUE(changed_rows(before.position, m.params().position).empty());
}

TEST(Locality, CharNgramTouchesNgramsAndWordToken) {
  EmbeddingModel m = make_model("charn/w+/p-/add");
  randomize_context(m, 2);
  const ParamTables before = m.params();
  SgnsTrainer trainer(m, quiet_config(), 3);
  const WordId center = m.vocab().id("walking");
  trainer.accumulate(center, m.vocab().id("path"), std::vector<WordId>{0});
  trainer.apply();
  std::set<std::size_t> expected;
  for (const auto& g : m.segmenter().split("walking")) {
    expected.insert(m.subwords().id(KeySpace::kSubword, g));
  }
  expected.insert(m.subwords().id(KeySpace::kWordToken, "walking"));
  EXPECT_EQ(changed_rows(before.subword, m.params().subword), expected);
  EXPECT_TRUE(changed_rows(before.position, m.params().position).empty());
}

TEST(Locality, PositionRowsFollowSubwordCount) {
  EmbeddingModel m = make_model("charn/w-/p+/add");
  randomize_context(m, 4);
  const ParamTables before = m.params();
  SgnsTrainer trainer(m, quiet_config(), 3);
  trainer.accumulate(m.vocab().id("walk"), m.vocab().id("and"), std::vector<WordId>{});
  trainer.apply();
  const std::size_t n = m.segmenter().split("walk").size();
  std::set<std::size_t> expected;
  for (std::size_t i = 0; i < n; ++i) expected.insert(std::min<std::size_t>(i, 19));
  EXPECT_EQ(changed_rows(before.position, m.params().position), expected);
}

// Reference gradient step written out in double precision.
struct Expected {
  std::map<std::size_t, std::vector<double>> subword, position, context;
};

void reference_grad(const EmbeddingModel& m, WordId center, WordId ctx,
                    const std::vector<WordId>& negs, Expected& out) {
  const auto& p = m.params();
  const std::size_t d = p.subword.cols();
  std::vector<double> v(d, 0.0);
  const auto plan = m.plan(center);
  for (const auto& t : plan) {
    for (std::size_t k = 0; k < d; ++k) {
      v[k] += p.subword.at(t.row, k);
      if (t.position >= 0) v[k] += p.position.at(t.position, k);
    }
  }
  std::vector<double> gv(d, 0.0);
  auto add_pair = [&](WordId c, double label) {
    double s = 0.0;
    for (std::size_t k = 0; k < d; ++k) s += v[k] * p.context.at(c, k);
    const double sig = 1.0 / (1.0 + std::exp(-s));
    const double g = sig - label;  // d loss / d score
    auto& cg = out.context[c];
    cg.resize(d, 0.0);
    for (std::size_t k = 0; k < d; ++k) {
      cg[k] += g * v[k];
      gv[k] += g * p.context.at(c, k);
    }
  };
  add_pair(ctx, 1.0);
  for (WordId n : negs) add_pair(n, 0.0);
  for (const auto& t : plan) {
    auto& sg = out.subword[t.row];
    sg.resize(d, 0.0);
    for (std::size_t k = 0; k < d; ++k) sg[k] += gv[k];
    if (t.position >= 0) {
      auto& pg = out.position[t.position];
      pg.resize(d, 0.0);
      for (std::size_t k = 0; k < d; ++k) pg[k] += gv[k];
    }
  }
}

void expect_step(const Matrix& before, const Matrix& after,
                 const std::map<std::size_t, std::vector<double>>& grads, double lr) {
  for (const auto& [r, g] : grads) {
    for (std::size_t k = 0; k < g.size(); ++k) {
      EXPECT_NEAR(after.at(r, k), before.at(r, k) - lr * g[k], 2e-6) << "row " << r;
    }
  }
}

TEST(Update, MatchesReferenceForEveryTable) {
  for (const char* label : {"charn/w+/p+/add", "bpe1e3/w-/p+/add", "w2v"}) {
    EmbeddingModel m = make_model(label);
    randomize_context(m, 9);
    const ParamTables before = m.params();
    const double lr = 0.05;
    TrainConfig tc = quiet_config();
    SgnsTrainer trainer(m, tc, 1);
    trainer.set_lr(lr);
    const WordId c = m.vocab().id("talked"), o = m.vocab().id("while");
    const std::vector<WordId> negs = {m.vocab().id("walk"), m.vocab().id("a")};
    Expected e;
    reference_grad(m, c, o, negs, e);
    trainer.accumulate(c, o, negs);
    trainer.apply();
    expect_step(before.subword, m.params().subword, e.subword, lr);
    expect_step(before.position, m.params().position, e.position, lr);
    expect_step(before.context, m.params().context, e.context, lr);
  }
}

TEST(Update, BatchSumsGradientsAtStaleParameters) {
  EmbeddingModel m = make_model("charn/w+/p+/add");
  randomize_context(m, 10);
  const ParamTables before = m.params();
  const double lr = 0.05;
  SgnsTrainer trainer(m, quiet_config(), 1);
  trainer.set_lr(lr);
  const WordId a = m.vocab().id("walker"), b = m.vocab().id("walked");
  const WordId o = m.vocab().id("path");
  const std::vector<WordId> negs = {m.vocab().id("the")};
  Expected e;
  reference_grad(m, a, o, negs, e);
  reference_grad(m, b, o, negs, e);  // same parameters: stale within a batch
  trainer.accumulate(a, o, negs);
  trainer.accumulate(b, o, negs);
  trainer.apply();
  expect_step(before.subword, m.params().subword, e.subword, lr);
  expect_step(before.position, m.params().position, e.position, lr);
  expect_step(before.context, m.params().context, e.context, lr);
}

TEST(Update, NonFiniteParametersRaiseTrainError) {
  EmbeddingModel m = make_model("w2v");
  randomize_context(m, 11);
  SgnsTrainer trainer(m, quiet_config(), 1);
  trainer.set_lr(1e45);
  trainer.accumulate(0, 1, std::vector<WordId>{2});
  EXPECT_THROW(trainer.apply(), TrainError);
}

TEST(Negatives, NeverEqualThePositive) {
  EmbeddingModel m = make_model("w2v");
  TrainConfig tc = quiet_config();
  tc.negatives = 20;
  SgnsTrainer trainer(m, tc, 5);
  for (int i = 0; i < 200; ++i) {
    for (WordId n : trainer.sample_negatives(0)) EXPECT_NE(n, 0);
  }
}

TEST(Negatives, FollowUnigramPowerDistribution) {
  EmbeddingModel m = make_model("w2v");
  TrainConfig tc = quiet_config();
  tc.negatives = 1;
  SgnsTrainer trainer(m, tc, 6);
  const auto p = negative_sampling_weights(m.vocab(), 0.75);
  std::vector<double> hits(p.size(), 0.0);
  const int n = 100'000;
  const WordId never = static_cast<WordId>(p.size());  // matches no real id
  for (int i = 0; i < n; ++i) hits[trainer.sample_negatives(never)[0]] += 1.0;
  for (std::size_t w = 0; w < p.size(); ++w) EXPECT_NEAR(hits[w] / n, p[w], 0.01);
}

TEST(GradCheck, AllConfigurationsPass) {
  for (bool position : {false, true}) {
    for (bool word_token : {false, true}) {
      GradCheckOptions o;
      o.position = position;
      o.word_token = word_token;
      o.trials = 30;
      const GradCheckReport r = grad_check(o);
      EXPECT_LT(r.max_rel_error(), 1e-4) << position << word_token;
      EXPECT_GT(r.checked, 0u);
      if (position) {
        EXPECT_GT(r.max_abs_position_grad, 0.0);
      } else {
        EXPECT_EQ(r.max_abs_position_grad, 0.0);
      }
    }
  }
}

Corpus synthetic_corpus(std::size_t tokens) {
  SyntheticOptions o;
  o.corpus_tokens = tokens;
  o.train_mentions = 10;
  o.dev_mentions = 10;
  o.test_mentions = 10;
  o.tag_sentences = 10;
  return make_synthetic_benchmark(o).corpus;
}

EmbeddingModel model_for(const Corpus& c, const std::string& label, int min_count) {
  ModelConfig mc = ModelConfig::from_label(label);
  mc.dim = 16;
  Vocab v = Vocab::build(c, min_count);
  Segmenter seg = make_segmenter(mc, v);
  return EmbeddingModel::create(mc, std::move(v), std::move(seg));
}

TEST(Train, SingleThreadIsBitReproducible) {
  const Corpus c = synthetic_corpus(5'000);
  TrainConfig tc = TrainConfig::for_group(data_group_for(c.token_count));
  tc.epochs = 3;
  tc.seed = 42;
  EmbeddingModel a = model_for(c, "charn/w+/p+/add", tc.min_count);
  EmbeddingModel b = model_for(c, "charn/w+/p+/add", tc.min_count);
  train(c, a, tc);
  train(c, b, tc);
  EXPECT_EQ(a.params().subword, b.params().subword);
  EXPECT_EQ(a.params().position, b.params().position);
  EXPECT_EQ(a.params().context, b.params().context);

  EmbeddingModel other = model_for(c, "charn/w+/p+/add", tc.min_count);
  tc.seed = 43;
  train(c, other, tc);
  EXPECT_FALSE(other.params().context == a.params().context);
}

TEST(Train, LossFallsAndLearningRateDecays) {
  const Corpus c = synthetic_corpus(20'000);
  TrainConfig tc;
  tc.epochs = 5;
  tc.subsample_t = 1e-3;
  tc.trace_every = 2'000;
  EmbeddingModel m = model_for(c, "w2v", 1);
  const TrainResult r = train(c, m, tc);
  ASSERT_GE(r.trace.size(), 3u);
  EXPECT_LT(r.trace.back().loss_ema, r.trace.front().loss_ema);
  for (std::size_t i = 1; i < r.trace.size(); ++i) {
    EXPECT_LE(r.trace[i].lr, r.trace[i - 1].lr);
    EXPECT_GT(r.trace[i].updates, r.trace[i - 1].updates);
  }
  EXPECT_GE(r.trace.back().lr, tc.lr_floor() - 1e-15);
  EXPECT_EQ(r.processed_tokens, 5u * c.token_count);

  std::stringstream ss;
  write_trace(r.trace, ss);
  std::string line;
  std::getline(ss, line);
  EXPECT_EQ(std::count(line.begin(), line.end(), '\t'), 2);
}

TEST(Train, ParallelRunStaysFiniteAndLearns) {
  const Corpus c = synthetic_corpus(20'000);
  TrainConfig tc;
  tc.epochs = 3;
  tc.threads = 4;
  tc.subsample_t = 1e-3;
  tc.trace_every = 1'000;
  EmbeddingModel m = model_for(c, "charn/w+/p-/add", 1);
  const TrainResult r = train(c, m, tc);
  for (const Matrix* t : {&m.params().subword, &m.params().context}) {
    for (std::size_t i = 0; i < t->rows(); ++i) {
      for (float x : t->row(i)) ASSERT_TRUE(std::isfinite(x));
    }
  }
  ASSERT_GE(r.trace.size(), 2u);
  EXPECT_LT(r.trace.back().loss_ema, r.trace.front().loss_ema);
}

TEST(Train, OutOfVocabularyTokensAreDropped) {
  const Corpus c = tokenize_corpus("a b c d\nrare a b\n");
  EmbeddingModel m = model_for(c, "w2v", 2);
  TrainConfig tc;
  tc.epochs = 1;
  const TrainResult r = train(c, m, tc);
  EXPECT_EQ(r.processed_tokens, 4u);  // "a b" twice; the rest fall below min count
}

TEST(TrainConfig, ValidationRejectsNonsense) {
  TrainConfig t;
  t.batch_size = 0;
  EXPECT_THROW(t.validate(), Error);
  t = TrainConfig{};
  t.window = 0;
  EXPECT_THROW(t.validate(), Error);
  t = TrainConfig::for_group(data_group_for(100'000));
  EXPECT_EQ(t.batch_size, 128);
  EXPECT_EQ(t.epochs, 30);
  EXPECT_EQ(t.min_count, 3);
}

}  // namespace
}  // namespace subtok
