#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "subtok/matrix.h"
#include "subtok/model.h"

namespace subtok {

enum class Split { kTrain, kDev, kTest };
std::string_view to_string(Split split);

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> dev;
  std::vector<std::size_t> test;

  const std::vector<std::size_t>& of(Split s) const;
};

// Seeded shuffle into floor(0.6n) / floor(0.2n) / remainder.
SplitIndices random_split(std::size_t n, std::uint64_t seed);

struct Mention {
  std::vector<std::string> tokens;
  std::string label;
};

struct MentionDataset {
  std::vector<Mention> examples;
  std::vector<std::string> labels;  // sorted
  SplitIndices split;

  int label_index(std::string_view label) const;
};

// Lines `token token ...<TAB>label`, split 60/20/20 with `split_seed`.
MentionDataset load_mentions(std::istream& in, std::uint64_t split_seed);
MentionDataset load_mentions(const std::filesystem::path& path,
                             std::uint64_t split_seed);
std::vector<Mention> read_mention_lines(std::istream& in);
void write_mentions(std::span<const Mention> mentions, std::ostream& out);
// Dataset with caller-defined splits, in train/dev/test order.
MentionDataset make_mention_dataset(std::vector<Mention> train,
                                    std::vector<Mention> dev,
                                    std::vector<Mention> test);

enum class TagScheme { kFullTag, kBio };

struct TaggedSentence {
  std::vector<std::string> tokens;
  std::vector<std::string> labels;
};

struct TagDataset {
  std::vector<TaggedSentence> sentences;
  TagScheme scheme = TagScheme::kFullTag;
  std::vector<std::string> labels;  // sorted
  SplitIndices split;

  int label_index(std::string_view label) const;
};

// True iff every label is `O` or `B-X` / `I-X` with non-empty X.
bool is_bio_label_set(std::span<const std::string> labels);
// Promotes an I-X that does not continue a B-X/I-X run into B-X.
void repair_bio(std::vector<std::string>& labels);

// CoNLL-style `token<TAB>label` lines, blank lines between sentences.
TagDataset load_conll(std::istream& in, std::uint64_t split_seed);
TagDataset load_conll(const std::filesystem::path& path,
                      std::uint64_t split_seed);
std::vector<TaggedSentence> read_conll_sentences(std::istream& in);
void write_conll(std::span<const TaggedSentence> sentences, std::ostream& out);
TagDataset make_tag_dataset(std::vector<TaggedSentence> train,
                            std::vector<TaggedSentence> dev,
                            std::vector<TaggedSentence> test);

enum class FeatureKind { kMentionMean, kTokenWindow };

// Multinomial logistic regression over composed embeddings.
struct SoftmaxProbe {
  FeatureKind kind = FeatureKind::kMentionMean;
  int window = 0;
  int dim = 0;
  std::vector<std::string> labels;
  Matrix weight;  // |labels| x feature_dim
  std::vector<float> bias;

  std::size_t feature_dim() const {
    return static_cast<std::size_t>(dim) * (2 * window + 1);
  }
  // Argmax over labels, ties to the lowest index.
  std::size_t predict(std::span<const float> feature) const;
};

struct ProbeOptions {
  int epochs = 100;
  double lr = 0.05;
  // Backpropagate into the subword and position tables.
  bool fine_tune = false;
  int patience = 5;
  std::uint64_t seed = 1;
};

std::vector<float> mention_feature(const EmbeddingModel& model,
                                   const Mention& mention);

SoftmaxProbe train_mention_probe(EmbeddingModel& model,
                                 const MentionDataset& data,
                                 const ProbeOptions& options);
double eval_mention_accuracy(const SoftmaxProbe& probe,
                             const EmbeddingModel& model,
                             const MentionDataset& data, Split split);

SoftmaxProbe train_tagger_probe(EmbeddingModel& model, const TagDataset& data,
                                int window, const ProbeOptions& options);
std::vector<std::vector<std::string>> predict_tags(const SoftmaxProbe& probe,
                                                   const EmbeddingModel& model,
                                                   const TagDataset& data,
                                                   Split split);

// Exact-match per-token accuracy: a token is correct only if its whole label
// string equals the gold label.
double tag_accuracy(std::span<const std::vector<std::string>> gold,
                    std::span<const std::vector<std::string>> pred);
double eval_tag_accuracy(const SoftmaxProbe& probe, const EmbeddingModel& model,
                         const TagDataset& data, Split split);

struct LabeledSpan {
  std::size_t start;
  std::size_t end;  // inclusive
  std::string type;

  bool operator==(const LabeledSpan&) const = default;
};

// Maximal B-X (I-X)* runs; a stray I-X opens a new span of type X.
std::vector<LabeledSpan> decode_spans(std::span<const std::string> labels);

struct SpanScores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Exact (start, end, type) matching; 0/0 ratios are 0.
SpanScores span_f1(std::span<const std::string> gold,
                   std::span<const std::string> pred);
// Micro-averaged over sentences.
SpanScores span_f1(std::span<const std::vector<std::string>> gold,
                   std::span<const std::vector<std::string>> pred);
SpanScores eval_span_f1(const SoftmaxProbe& probe, const EmbeddingModel& model,
                        const TagDataset& data, Split split);

// `task<TAB>config<TAB>split<TAB>metric<TAB>value`.
void write_metric_row(std::ostream& out, std::string_view task,
                      std::string_view config, std::string_view split,
                      std::string_view metric, double value);

}  // namespace subtok
