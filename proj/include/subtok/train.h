#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <iosfwd>
#include <span>
#include <vector>

#include "subtok/corpus.h"
#include "subtok/model.h"
#include "subtok/random.h"

namespace subtok {

struct TrainConfig {
  int window = 5;
  int negatives = 5;
  double lr_start = 0.025;
  double ns_power = 0.75;
  double subsample_t = 1e-5;
  int epochs = 5;
  // (center, context) pairs whose gradients are summed into one update.
  int batch_size = 1;
  int min_count = 1;
  int threads = 1;
  std::uint64_t seed = 1;
  std::size_t trace_every = 10'000;

  static TrainConfig for_group(const DataGroup& group);
  double lr_floor() const { return lr_start * 1e-4; }
  void validate() const;
};

struct TraceRow {
  std::uint64_t updates;
  double lr;
  double loss_ema;
};

struct TrainResult {
  std::vector<TraceRow> trace;
  std::uint64_t pairs = 0;
  std::uint64_t processed_tokens = 0;
};

// TSV `update_count<TAB>lr<TAB>loss_ema`.
void write_trace(std::span<const TraceRow> trace, std::ostream& out);

// SGD state over one model: negative sampler, gradient buffers and the
// learning-rate schedule. Not thread-safe; train() gives each worker its own.
class SgnsTrainer {
 public:
  SgnsTrainer(EmbeddingModel& model, const TrainConfig& config,
              std::uint64_t seed);
  ~SgnsTrainer();
  SgnsTrainer(SgnsTrainer&&) noexcept;

  // Samples negatives, adds the pair's gradients to the pending batch and
  // returns its loss. Parameters are not modified until apply().
  double accumulate(WordId center, WordId context);
  // Same, with caller-chosen negatives.
  double accumulate(WordId center, WordId context,
                    std::span<const WordId> negatives);
  // SGD update of every row touched since the last apply(), at current_lr().
  void apply();
  // One pair followed by an immediate update.
  double step(WordId center, WordId context) {
    const double loss = accumulate(center, context);
    apply();
    return loss;
  }

  std::vector<WordId> sample_negatives(WordId positive);

  double current_lr() const { return lr_; }
  void set_lr(double lr) { lr_ = lr; }
  Rng& rng() { return rng_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  Rng rng_;
  double lr_;
};

// Epoch loop over the corpus: frequent-word subsampling, dynamic windows of
// radius uniform in [1, window], linear lr decay from lr_start to
// lr_start * 1e-4 over epochs * corpus tokens. threads == 1 is bit-for-bit
// reproducible; more threads update the shared tables without locks.
TrainResult train(const Corpus& corpus, EmbeddingModel& model,
                  const TrainConfig& config);

struct GradCheckOptions {
  int dim = 10;
  int trials = 100;
  bool position = false;
  bool word_token = false;
  std::uint64_t seed = 7;
  double step = 1e-4;
  // Parameter value range; 0 zero-initialises every table.
  double init_scale = 0.5;
};

struct GradCheckReport {
  double max_rel_error_subword = 0.0;
  double max_rel_error_position = 0.0;
  double max_rel_error_context = 0.0;
  double max_rel_error_word_token = 0.0;
  double max_abs_position_grad = 0.0;  // largest |analytic| position entry
  double max_abs_numeric_position_grad = 0.0;
  std::size_t checked = 0;

  double max_rel_error() const;
};

// Compares the analytic SGNS gradients (the same code train() runs, at
// double precision) against central differences on random small models.
// Relative error is |a - n| / max(|a|, |n|, 1e-4).
GradCheckReport grad_check(const GradCheckOptions& options);

}  // namespace subtok
