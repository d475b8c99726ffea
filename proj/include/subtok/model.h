#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "subtok/corpus.h"
#include "subtok/key_values.h"
#include "subtok/matrix.h"
#include "subtok/segmenter.h"

namespace subtok {

struct ModelConfig {
  SegmenterKind segmenter = SegmenterKind::kCharNgram;
  std::size_t merges = 10'000;  // bpe only
  int ngram_min = 3;            // charn only
  int ngram_max = 6;
  int morf_iters = 10;          // morf only
  bool word_token = false;      // w+ / w-
  bool position = false;        // p+ / p-
  int dim = 50;
  int max_positions = 20;
  std::uint64_t seed = 1;

  int context_dim() const { return dim; }

  // Segmenter label as used in result tables, e.g. "charn", "bpe1e4",
  // "bpe2500".
  std::string segmenter_label() const;
  // Full configuration label, e.g. "charn/w+/p-/add".
  std::string label() const;

  void validate() const;
  KeyValues to_key_values() const;
  static ModelConfig from_key_values(const KeyValues& kv);
  // Inverse of label(). Also accepts "w2v" (word/w-/p-) and "ft"
  // (charn/w+/p-), and labels without the trailing "/add".
  static ModelConfig from_label(std::string_view label);
};

// Learns (bpe, morf) or constructs (charn, word) the configured segmenter.
Segmenter make_segmenter(const ModelConfig& config, const Vocab& vocab);

template <typename T>
struct BasicParamTables {
  BasicMatrix<T> subword;   // |S| x d
  BasicMatrix<T> position;  // max_positions x d
  BasicMatrix<T> context;   // |V| x d
};

using ParamTables = BasicParamTables<float>;

// Subword and position rows i.i.d. uniform on [-0.5/d, 0.5/d]; context rows
// zero.
ParamTables init_params(const ModelConfig& config, std::size_t subword_rows,
                        std::size_t vocab_rows);

// One summand of a composed word vector.
struct ComposeTerm {
  SubwordId row;
  int position;  // index into the position table, or -1 for none
};

// Resolves a segmentation against the subword vocabulary. Unknown elements
// are dropped but keep their sequence index for position assignment; the
// word-token element never gets a position.
std::vector<ComposeTerm> compose_plan(const Segmentation& seg,
                                      const SubwordVocab& subwords,
                                      const ModelConfig& config);

template <typename T>
void compose_into(const BasicParamTables<T>& params,
                  std::span<const ComposeTerm> plan, std::span<T> out) {
  std::fill(out.begin(), out.end(), T{});
  for (const ComposeTerm& term : plan) {
    auto s = params.subword.row(term.row);
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += s[k];
    if (term.position >= 0) {
      auto p = params.position.row(term.position);
      for (std::size_t k = 0; k < out.size(); ++k) out[k] += p[k];
    }
  }
}

struct ComposedVector {
  std::vector<float> values;
  bool all_unknown = false;
};

ComposedVector compose_word(const ParamTables& params, const Segmentation& seg,
                            const SubwordVocab& subwords,
                            const ModelConfig& config);

// A trained (or freshly initialised) subword-informed embedding model.
class EmbeddingModel {
 public:
  EmbeddingModel(ModelConfig config, Vocab vocab, Segmenter segmenter,
                 SubwordVocab subwords, ParamTables params);

  // Builds the subword vocabulary and initial parameters for `vocab`.
  static EmbeddingModel create(const ModelConfig& config, Vocab vocab,
                               Segmenter segmenter);

  const ModelConfig& config() const { return config_; }
  const Vocab& vocab() const { return vocab_; }
  const Segmenter& segmenter() const { return segmenter_; }
  const SubwordVocab& subwords() const { return subwords_; }
  const ParamTables& params() const { return params_; }
  ParamTables& params() { return params_; }
  int dim() const { return config_.dim; }

  std::vector<ComposeTerm> plan(std::string_view word) const;
  // Cached plan of an in-vocabulary word.
  std::span<const ComposeTerm> plan(WordId id) const { return plans_[id]; }

  // Works for unseen words through their known subwords.
  ComposedVector word_vector(std::string_view word) const;

  // Checkpoint directory: config.txt, vocab.tsv, subwords.tsv,
  // segmenter.model and {subword,position,context}.mat.
  void save(const std::filesystem::path& dir) const;
  static EmbeddingModel load(const std::filesystem::path& dir);

 private:
  ModelConfig config_;
  Vocab vocab_;
  Segmenter segmenter_;
  SubwordVocab subwords_;
  ParamTables params_;
  std::vector<std::vector<ComposeTerm>> plans_;
};

// Text vectors: header `<|V|> <d>`, then `word v_1 ... v_d` per vocabulary
// word in id order, values in 6-decimal fixed notation.
void export_vectors(const EmbeddingModel& model, std::ostream& out);
void export_vectors(const EmbeddingModel& model,
                    const std::filesystem::path& path);

struct WordVectors {
  std::vector<std::string> words;
  Matrix vectors;
};

WordVectors import_vectors(std::istream& in);

}  // namespace subtok
