#include "subtok/train.h"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cmath>
#include <memory>
#include <mutex>
#include <ostream>
#include <thread>

#include "subtok/error.h"
#include "subtok/sgns.h"

namespace subtok {
namespace {

// Gradient rows for the parameter rows touched since the last clear().
class SparseGrad {
 public:
  SparseGrad(std::size_t rows, std::size_t cols) : slot_(rows, -1), cols_(cols) {}

  // The returned span is invalidated by the next call that adds a row.
  std::span<float> row(std::size_t r) {
    if (slot_[r] < 0) {
      slot_[r] = static_cast<std::int64_t>(touched_.size());
      touched_.push_back(r);
      buf_.insert(buf_.end(), cols_, 0.0f);
    }
    return {buf_.data() + slot_[r] * cols_, cols_};
  }

  template <typename F>
  void for_each(F&& fn) const {
    for (std::size_t i = 0; i < touched_.size(); ++i) {
      fn(touched_[i], std::span<const float>(buf_.data() + i * cols_, cols_));
    }
  }

  void clear() {
    for (std::size_t r : touched_) slot_[r] = -1;
    touched_.clear();
    buf_.clear();
  }

 private:
  std::vector<std::int64_t> slot_;
  std::vector<std::size_t> touched_;
  std::vector<float> buf_;
  std::size_t cols_;
};

}  // namespace

TrainConfig TrainConfig::for_group(const DataGroup& group) {
  TrainConfig c;
  c.epochs = group.epochs;
  c.batch_size = group.batch_size;
  c.min_count = group.min_count;
  return c;
}

void TrainConfig::validate() const {
  if (window < 1) throw Error("window must be >= 1");
  if (negatives < 1) throw Error("negatives must be >= 1");
  if (!(lr_start > 0.0)) throw Error("lr_start must be > 0");
  if (epochs < 0) throw Error("epochs must be >= 0");
  if (batch_size < 1) throw Error("batch_size must be >= 1");
  if (min_count < 1) throw Error("min_count must be >= 1");
  if (threads < 1) throw Error("threads must be >= 1");
  if (trace_every < 1) throw Error("trace_every must be >= 1");
}

void write_trace(std::span<const TraceRow> trace, std::ostream& out) {
  char buf[96];
  for (const TraceRow& r : trace) {
    std::snprintf(buf, sizeof buf, "%llu\t%.8g\t%.6f\n",
                  static_cast<unsigned long long>(r.updates), r.lr, r.loss_ema);
    out << buf;
  }
}

struct SgnsTrainer::Impl {
  Impl(EmbeddingModel& m, const TrainConfig& c, bool shared_tables)
      : model(m),
        config(c),
        shared(shared_tables),
        sampler(negative_sampling_weights(m.vocab(), c.ns_power)),
        subword_grad(m.params().subword.rows(), m.params().subword.cols()),
        position_grad(m.params().position.rows(), m.params().position.cols()),
        context_grad(m.params().context.rows(), m.params().context.cols()),
        target(m.params().subword.cols()),
        target_grad(m.params().subword.cols()),
        local_context(static_cast<std::size_t>(c.negatives) + 1,
                      m.params().context.cols()) {}

  float load(const float& x) const {
    if (!shared) return x;
    return std::atomic_ref<float>(const_cast<float&>(x))
        .load(std::memory_order_relaxed);
  }

  void store(float& x, float v) const {
    if (!shared) {
      x = v;
    } else {
      std::atomic_ref<float>(x).store(v, std::memory_order_relaxed);
    }
  }

  void apply_rows(const SparseGrad& grad, Matrix& table, double lr,
                  const char* what) {
    const auto step = static_cast<float>(lr);
    grad.for_each([&](std::size_t r, std::span<const float> g) {
      auto row = table.row(r);
      bool finite = true;
      if (!shared) {
        for (std::size_t k = 0; k < row.size(); ++k) {
          row[k] -= step * g[k];
          finite &= std::isfinite(row[k]);
        }
      } else {
        for (std::size_t k = 0; k < row.size(); ++k) {
          const float v = load(row[k]) - step * g[k];
          finite &= std::isfinite(v);
          store(row[k], v);
        }
      }
      if (!finite) {
        throw TrainError(std::string("non-finite ") + what +
                         " parameter at update " + std::to_string(updates) +
                         " (word '" + model.vocab().word(last_center) + "')");
      }
    });
  }

  // Addition passes dL/dv unchanged to every summand.
  void flush_target_grad() {
    if (!composed) return;
    const std::size_t d = target_grad.size();
    for (const ComposeTerm& t : model.plan(last_center)) {
      auto row = subword_grad.row(t.row);
      for (std::size_t k = 0; k < d; ++k) row[k] += target_grad[k];
      if (t.position >= 0) {
        auto pos = position_grad.row(t.position);
        for (std::size_t k = 0; k < d; ++k) pos[k] += target_grad[k];
      }
    }
    std::fill(target_grad.begin(), target_grad.end(), 0.0f);
    composed = false;
  }

  EmbeddingModel& model;
  TrainConfig config;
  bool shared;
  DiscreteSampler sampler;
  SparseGrad subword_grad;
  SparseGrad position_grad;
  SparseGrad context_grad;
  std::vector<float> target;
  std::vector<float> target_grad;
  Matrix local_context;
  std::vector<WordId> local_ids;
  std::vector<WordId> local_negs;
  bool composed = false;
  std::uint64_t updates = 0;
  WordId last_center = 0;
};

SgnsTrainer::SgnsTrainer(EmbeddingModel& model, const TrainConfig& config,
                         std::uint64_t seed)
    : impl_(std::make_unique<Impl>(model, config, config.threads > 1)),
      rng_(seed),
      lr_(config.lr_start) {
  config.validate();
}

SgnsTrainer::~SgnsTrainer() = default;
SgnsTrainer::SgnsTrainer(SgnsTrainer&&) noexcept = default;

std::vector<WordId> SgnsTrainer::sample_negatives(WordId positive) {
  std::vector<WordId> negs;
  negs.reserve(impl_->config.negatives);
  for (int j = 0; j < impl_->config.negatives; ++j) {
    for (int attempt = 0; attempt < 10; ++attempt) {
      const auto n = static_cast<WordId>(impl_->sampler.sample(rng_));
      if (n != positive) {
        negs.push_back(n);
        break;
      }
    }
  }
  return negs;
}

double SgnsTrainer::accumulate(WordId center, WordId context) {
  const std::vector<WordId> negs = sample_negatives(context);
  return accumulate(center, context, negs);
}

double SgnsTrainer::accumulate(WordId center, WordId context,
                               std::span<const WordId> negatives) {
  Impl& s = *impl_;
  const ParamTables& p = s.model.params();
  const std::size_t d = s.target.size();

  // Parameters only change in apply(), so the composed center vector can be
  // reused until then; its gradient is scattered once per center.
  if (!s.composed || center != s.last_center) {
    s.flush_target_grad();
    s.last_center = center;
    std::fill(s.target.begin(), s.target.end(), 0.0f);
    for (const ComposeTerm& t : s.model.plan(center)) {
      auto row = p.subword.row(t.row);
      for (std::size_t k = 0; k < d; ++k) s.target[k] += s.load(row[k]);
      if (t.position >= 0) {
        auto pos = p.position.row(t.position);
        for (std::size_t k = 0; k < d; ++k) s.target[k] += s.load(pos[k]);
      }
    }
    s.composed = true;
  }

  // Snapshot the context rows so concurrent writers never race with the
  // gradient computation.
  const std::size_t rows = negatives.size() + 1;
  if (s.local_context.rows() < rows) s.local_context = Matrix(rows, d);
  s.local_ids.assign(1, context);
  s.local_ids.insert(s.local_ids.end(), negatives.begin(), negatives.end());
  for (std::size_t i = 0; i < rows; ++i) {
    auto src = p.context.row(s.local_ids[i]);
    auto dst = s.local_context.row(i);
    for (std::size_t k = 0; k < d; ++k) dst[k] = s.load(src[k]);
  }
  s.local_negs.resize(negatives.size());
  for (std::size_t i = 0; i < s.local_negs.size(); ++i) {
    s.local_negs[i] = static_cast<WordId>(i + 1);
  }

  return sgns_backward<float>(
      s.target, 0, s.local_negs, s.local_context, s.target_grad,
      [&](WordId local, float g) {
        auto row = s.context_grad.row(s.local_ids[local]);
        for (std::size_t k = 0; k < d; ++k) row[k] += g * s.target[k];
      });
}

void SgnsTrainer::apply() {
  Impl& s = *impl_;
  s.flush_target_grad();
  s.composed = false;
  ParamTables& p = s.model.params();
  s.apply_rows(s.subword_grad, p.subword, lr_, "subword");
  s.apply_rows(s.position_grad, p.position, lr_, "position");
  s.apply_rows(s.context_grad, p.context, lr_, "context");
  s.subword_grad.clear();
  s.position_grad.clear();
  s.context_grad.clear();
  ++s.updates;
}

TrainResult train(const Corpus& corpus, EmbeddingModel& model,
                  const TrainConfig& config) {
  config.validate();
  const Vocab& vocab = model.vocab();

  std::vector<std::vector<WordId>> sentences;
  sentences.reserve(corpus.sentences.size());
  std::uint64_t in_vocab = 0;
  for (const Sentence& s : corpus.sentences) {
    std::vector<WordId> ids;
    for (const std::string& tok : s) {
      const WordId id = vocab.id(tok);
      if (id != kNoWord) ids.push_back(id);
    }
    in_vocab += ids.size();
    if (ids.size() > 1) sentences.push_back(std::move(ids));
  }
  const std::vector<double> keep = subsample_keep_probs(vocab, config.subsample_t);
  const double total = static_cast<double>(in_vocab) * config.epochs;

  std::atomic<std::uint64_t> processed{0};
  std::atomic<std::uint64_t> pairs{0};
  std::mutex trace_mu;
  TrainResult result;

  auto lr_at = [&](std::uint64_t done) {
    const double remaining =
        total > 0.0 ? std::max(0.0, 1.0 - static_cast<double>(done) / total) : 1.0;
    return config.lr_start * (1e-4 + (1.0 - 1e-4) * remaining);
  };

  auto worker = [&](std::size_t begin, std::size_t end, std::uint64_t seed) {
    SgnsTrainer trainer(model, config, seed);
    Rng& rng = trainer.rng();
    double ema = -1.0;
    int pending = 0;
    std::vector<WordId> kept;
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
      for (std::size_t si = begin; si < end; ++si) {
        const auto& sent = sentences[si];
        kept.clear();
        for (WordId w : sent) {
          if (keep[w] >= 1.0 || rng.uniform() < keep[w]) kept.push_back(w);
        }
        const auto n = static_cast<std::int64_t>(kept.size());
        for (std::int64_t i = 0; i < n; ++i) {
          const auto radius = static_cast<std::int64_t>(rng.below(config.window)) + 1;
          const std::int64_t lo = std::max<std::int64_t>(0, i - radius);
          const std::int64_t hi = std::min<std::int64_t>(n - 1, i + radius);
          for (std::int64_t j = lo; j <= hi; ++j) {
            if (j == i) continue;
            const double loss = trainer.accumulate(kept[i], kept[j]);
            ema = ema < 0.0 ? loss : 0.999 * ema + 0.001 * loss;
            if (++pending == config.batch_size) {
              trainer.set_lr(lr_at(processed.load(std::memory_order_relaxed)));
              trainer.apply();
              pending = 0;
            }
            const std::uint64_t count = pairs.fetch_add(1) + 1;
            if (count % config.trace_every == 0) {
              std::lock_guard lock(trace_mu);
              result.trace.push_back({count, trainer.current_lr(), ema});
            }
          }
        }
        processed.fetch_add(sent.size(), std::memory_order_relaxed);
      }
    }
    if (pending > 0) {
      trainer.set_lr(lr_at(processed.load()));
      trainer.apply();
    }
  };

  if (config.threads == 1 || sentences.size() < 2) {
    worker(0, sentences.size(), config.seed);
  } else {
    const std::size_t t = std::min<std::size_t>(config.threads, sentences.size());
    std::vector<std::exception_ptr> errors(t);
    {
      std::vector<std::jthread> pool;
      for (std::size_t w = 0; w < t; ++w) {
        const std::size_t b = sentences.size() * w / t;
        const std::size_t e = sentences.size() * (w + 1) / t;
        pool.emplace_back([&, w, b, e] {
          try {
            worker(b, e, config.seed + 1'000'003ULL * w);
          } catch (...) {
            errors[w] = std::current_exception();
          }
        });
      }
    }
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
    std::sort(result.trace.begin(), result.trace.end(),
              [](const TraceRow& a, const TraceRow& b) { return a.updates < b.updates; });
  }
  result.pairs = pairs.load();
  result.processed_tokens = processed.load();
  return result;
}

double GradCheckReport::max_rel_error() const {
  return std::max({max_rel_error_subword, max_rel_error_position,
                   max_rel_error_context, max_rel_error_word_token});
}

GradCheckReport grad_check(const GradCheckOptions& options) {
  constexpr std::size_t kSubwordRows = 8;
  constexpr std::size_t kWordTokenRows = 4;
  constexpr std::size_t kPositions = 4;
  constexpr std::size_t kContextRows = 8;
  constexpr int kNegatives = 5;
  const auto d = static_cast<std::size_t>(options.dim);

  Rng rng(options.seed);
  GradCheckReport report;
  auto rel = [](double a, double n) {
    return std::abs(a - n) / std::max({std::abs(a), std::abs(n), 1e-4});
  };

  for (int trial = 0; trial < options.trials; ++trial) {
    BasicParamTables<double> p{
        BasicMatrix<double>(kSubwordRows + kWordTokenRows, d),
        BasicMatrix<double>(kPositions, d), BasicMatrix<double>(kContextRows, d)};
    for (auto* m : {&p.subword, &p.position, &p.context}) {
      for (double& x : m->data()) x = rng.uniform(-options.init_scale, options.init_scale);
    }

    std::vector<ComposeTerm> plan;
    const auto len = static_cast<int>(rng.below(6)) + 1;
    for (int i = 0; i < len; ++i) {
      const int pos = options.position
                          ? std::min(i, static_cast<int>(kPositions) - 1)
                          : -1;
      plan.push_back({static_cast<SubwordId>(rng.below(kSubwordRows)), pos});
    }
    if (options.word_token) {
      plan.push_back(
          {static_cast<SubwordId>(kSubwordRows + rng.below(kWordTokenRows)), -1});
    }
    const auto positive = static_cast<WordId>(rng.below(kContextRows));
    std::vector<WordId> negs;
    while (negs.size() < kNegatives) {
      const auto n = static_cast<WordId>(rng.below(kContextRows));
      if (n != positive) negs.push_back(n);
    }

    auto loss_at = [&]() {
      std::vector<double> v(d);
      compose_into<double>(p, plan, v);
      return sgns_loss<double>(v, positive, negs, p.context);
    };

    // Analytic gradients through the training code path.
    std::vector<double> v(d);
    compose_into<double>(p, plan, v);
    std::vector<double> tg(d, 0.0);
    BasicMatrix<double> g_sub(p.subword.rows(), d), g_pos(kPositions, d),
        g_ctx(kContextRows, d);
    sgns_backward<double>(v, positive, negs, p.context, tg,
                          [&](WordId id, double g) {
                            auto row = g_ctx.row(id);
                            for (std::size_t k = 0; k < d; ++k) row[k] += g * v[k];
                          });
    for (const ComposeTerm& t : plan) {
      auto row = g_sub.row(t.row);
      for (std::size_t k = 0; k < d; ++k) row[k] += tg[k];
      if (t.position >= 0) {
        auto pr = g_pos.row(t.position);
        for (std::size_t k = 0; k < d; ++k) pr[k] += tg[k];
      }
    }

    auto check = [&](BasicMatrix<double>& table, const BasicMatrix<double>& grad,
                     auto&& record) {
      for (std::size_t r = 0; r < table.rows(); ++r) {
        for (std::size_t k = 0; k < d; ++k) {
          double& x = table.at(r, k);
          const double saved = x;
          x = saved + options.step;
          const double up = loss_at();
          x = saved - options.step;
          const double down = loss_at();
          x = saved;
          const double numeric = (up - down) / (2.0 * options.step);
          record(r, grad.at(r, k), numeric);
          ++report.checked;
        }
      }
    };
    check(p.subword, g_sub, [&](std::size_t r, double a, double n) {
      double& slot = r < kSubwordRows ? report.max_rel_error_subword
                                      : report.max_rel_error_word_token;
      slot = std::max(slot, rel(a, n));
    });
    check(p.position, g_pos, [&](std::size_t, double a, double n) {
      report.max_rel_error_position = std::max(report.max_rel_error_position, rel(a, n));
      report.max_abs_position_grad = std::max(report.max_abs_position_grad, std::abs(a));
      report.max_abs_numeric_position_grad =
          std::max(report.max_abs_numeric_position_grad, std::abs(n));
    });
    check(p.context, g_ctx, [&](std::size_t, double a, double n) {
      report.max_rel_error_context = std::max(report.max_rel_error_context, rel(a, n));
    });
  }
  return report;
}

}  // namespace subtok
