#include "subtok/probe.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <unordered_map>

#include "subtok/error.h"
#include "subtok/random.h"

namespace subtok {
namespace {

std::vector<std::string> sorted_unique(std::set<std::string> s) {
  return {s.begin(), s.end()};
}

int find_label(const std::vector<std::string>& labels, std::string_view l) {
  auto it = std::lower_bound(labels.begin(), labels.end(), l);
  if (it == labels.end() || *it != l) return -1;
  return static_cast<int>(it - labels.begin());
}

// Word vectors for frozen tables, computed on first use.
class VectorCache {
 public:
  explicit VectorCache(const EmbeddingModel& model) : model_(model) {}

  const std::vector<float>& get(const std::string& word) {
    auto it = cache_.find(word);
    if (it == cache_.end()) {
      it = cache_.emplace(word, model_.word_vector(word).values).first;
    }
    return it->second;
  }

 private:
  const EmbeddingModel& model_;
  std::unordered_map<std::string, std::vector<float>> cache_;
};

std::vector<float> mean_feature(std::span<const std::string> tokens,
                                auto&& vector_of, std::size_t dim) {
  std::vector<float> f(dim, 0.0f);
  for (const std::string& t : tokens) {
    const std::vector<float>& v = vector_of(t);
    for (std::size_t k = 0; k < dim; ++k) f[k] += v[k];
  }
  const float inv = 1.0f / static_cast<float>(tokens.size());
  for (float& x : f) x *= inv;
  return f;
}

std::vector<float> window_feature(
    std::span<const std::vector<float>> token_vectors, std::size_t i,
    int window, std::size_t dim) {
  std::vector<float> f(dim * (2 * window + 1), 0.0f);
  for (int o = -window; o <= window; ++o) {
    const auto j = static_cast<std::int64_t>(i) + o;
    if (j < 0 || j >= static_cast<std::int64_t>(token_vectors.size())) continue;
    std::copy(token_vectors[j].begin(), token_vectors[j].end(),
              f.begin() + (o + window) * dim);
  }
  return f;
}

// One SGD step of softmax cross-entropy. Returns dL/dx when requested.
void softmax_step(SoftmaxProbe& probe, std::span<const float> x,
                  std::size_t gold, float lr, std::vector<float>* dx) {
  const std::size_t labels = probe.labels.size();
  std::vector<double> logits(labels);
  double max_logit = -INFINITY;
  for (std::size_t l = 0; l < labels; ++l) {
    auto w = probe.weight.row(l);
    double s = probe.bias[l];
    for (std::size_t k = 0; k < x.size(); ++k) s += static_cast<double>(w[k]) * x[k];
    logits[l] = s;
    max_logit = std::max(max_logit, s);
  }
  double z = 0.0;
  for (double& s : logits) {
    s = std::exp(s - max_logit);
    z += s;
  }
  if (dx) dx->assign(x.size(), 0.0f);
  for (std::size_t l = 0; l < labels; ++l) {
    const auto g = static_cast<float>(logits[l] / z - (l == gold ? 1.0 : 0.0));
    auto w = probe.weight.row(l);
    for (std::size_t k = 0; k < x.size(); ++k) {
      if (dx) (*dx)[k] += g * w[k];
      w[k] -= lr * g * x[k];
    }
    probe.bias[l] -= lr * g;
  }
}

void backprop_into_tables(EmbeddingModel& model, const std::string& word,
                          std::span<const float> grad, float lr) {
  ParamTables& p = model.params();
  for (const ComposeTerm& t : model.plan(word)) {
    auto row = p.subword.row(t.row);
    for (std::size_t k = 0; k < row.size(); ++k) row[k] -= lr * grad[k];
    if (t.position >= 0) {
      auto pos = p.position.row(t.position);
      for (std::size_t k = 0; k < pos.size(); ++k) pos[k] -= lr * grad[k];
    }
  }
}

SoftmaxProbe empty_probe(FeatureKind kind, int window, int dim,
                         std::vector<std::string> labels) {
  SoftmaxProbe p;
  p.kind = kind;
  p.window = window;
  p.dim = dim;
  p.labels = std::move(labels);
  p.weight = Matrix(p.labels.size(), p.feature_dim());
  p.bias.assign(p.labels.size(), 0.0f);
  return p;
}

// Epoch loop with early stopping on a dev metric (higher is better). With an
// empty dev split every epoch runs and the final probe is returned.
template <typename EpochFn, typename DevFn>
SoftmaxProbe fit_with_early_stopping(SoftmaxProbe probe,
                                     const ProbeOptions& options,
                                     bool has_dev, EpochFn&& run_epoch,
                                     DevFn&& dev_metric) {
  SoftmaxProbe best = probe;
  double best_metric = -1.0;
  int bad_epochs = 0;
  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    run_epoch(probe);
    if (!has_dev) {
      best = probe;
      continue;
    }
    const double m = dev_metric(probe);
    if (m > best_metric) {
      best_metric = m;
      best = probe;
      bad_epochs = 0;
    } else if (++bad_epochs >= options.patience) {
      break;
    }
  }
  return best;
}

}  // namespace

std::string_view to_string(Split split) {
  switch (split) {
    case Split::kTrain:
      return "train";
    case Split::kDev:
      return "dev";
    case Split::kTest:
      return "test";
  }
  return "?";
}

const std::vector<std::size_t>& SplitIndices::of(Split s) const {
  switch (s) {
    case Split::kTrain:
      return train;
    case Split::kDev:
      return dev;
    case Split::kTest:
      break;
  }
  return test;
}

SplitIndices random_split(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(seed);
  rng.shuffle(order);
  const std::size_t n_train = n * 6 / 10;
  const std::size_t n_dev = n * 2 / 10;
  SplitIndices s;
  s.train.assign(order.begin(), order.begin() + n_train);
  s.dev.assign(order.begin() + n_train, order.begin() + n_train + n_dev);
  s.test.assign(order.begin() + n_train + n_dev, order.end());
  return s;
}

int MentionDataset::label_index(std::string_view label) const {
  return find_label(labels, label);
}

int TagDataset::label_index(std::string_view label) const {
  return find_label(labels, label);
}

std::vector<Mention> read_mention_lines(std::istream& in) {
  std::vector<Mention> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.rfind('\t');
    if (tab == std::string::npos || tab + 1 == line.size()) {
      throw FormatError("expected 'tokens<TAB>label'", line_no);
    }
    Mention m;
    m.label = line.substr(tab + 1);
    std::size_t pos = 0;
    const std::string text = line.substr(0, tab);
    while (pos < text.size()) {
      const auto b = text.find_first_not_of(" \t", pos);
      if (b == std::string::npos) break;
      const auto e = text.find_first_of(" \t", b);
      m.tokens.push_back(text.substr(b, e == std::string::npos ? e : e - b));
      pos = e == std::string::npos ? text.size() : e;
    }
    if (m.tokens.empty()) throw FormatError("mention has no tokens", line_no);
    out.push_back(std::move(m));
  }
  return out;
}

void write_mentions(std::span<const Mention> mentions, std::ostream& out) {
  for (const Mention& m : mentions) {
    for (std::size_t i = 0; i < m.tokens.size(); ++i) {
      out << (i ? " " : "") << m.tokens[i];
    }
    out << '\t' << m.label << '\n';
  }
}

MentionDataset load_mentions(std::istream& in, std::uint64_t split_seed) {
  MentionDataset d;
  d.examples = read_mention_lines(in);
  std::set<std::string> labels;
  for (const Mention& m : d.examples) labels.insert(m.label);
  d.labels = sorted_unique(std::move(labels));
  d.split = random_split(d.examples.size(), split_seed);
  return d;
}

MentionDataset load_mentions(const std::filesystem::path& path,
                             std::uint64_t split_seed) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return load_mentions(in, split_seed);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

MentionDataset make_mention_dataset(std::vector<Mention> train,
                                    std::vector<Mention> dev,
                                    std::vector<Mention> test) {
  MentionDataset d;
  std::set<std::string> labels;
  for (auto* part : {&train, &dev, &test}) {
    auto& idx = part == &train ? d.split.train
                : part == &dev ? d.split.dev
                               : d.split.test;
    for (Mention& m : *part) {
      labels.insert(m.label);
      idx.push_back(d.examples.size());
      d.examples.push_back(std::move(m));
    }
  }
  d.labels = sorted_unique(std::move(labels));
  return d;
}

bool is_bio_label_set(std::span<const std::string> labels) {
  for (const std::string& l : labels) {
    if (l == "O") continue;
    if (l.size() < 3 || (l[0] != 'B' && l[0] != 'I') || l[1] != '-') return false;
  }
  return true;
}

void repair_bio(std::vector<std::string>& labels) {
  std::string prev_type;  // empty outside a span
  for (std::string& l : labels) {
    if (l == "O") {
      prev_type.clear();
      continue;
    }
    const std::string type = l.substr(2);
    if (l[0] == 'I' && type != prev_type) l[0] = 'B';
    prev_type = type;
  }
}

std::vector<TaggedSentence> read_conll_sentences(std::istream& in) {
  std::vector<TaggedSentence> out;
  TaggedSentence cur;
  std::string line;
  std::size_t line_no = 0;
  auto flush = [&] {
    if (!cur.tokens.empty()) out.push_back(std::move(cur));
    cur = {};
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) {
      flush();
      continue;
    }
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || tab + 1 == line.size() ||
        line.find('\t', tab + 1) != std::string::npos) {
      throw FormatError("expected 'token<TAB>label'", line_no);
    }
    cur.tokens.push_back(line.substr(0, tab));
    cur.labels.push_back(line.substr(tab + 1));
  }
  flush();
  return out;
}

void write_conll(std::span<const TaggedSentence> sentences, std::ostream& out) {
  for (const TaggedSentence& s : sentences) {
    for (std::size_t i = 0; i < s.tokens.size(); ++i) {
      out << s.tokens[i] << '\t' << s.labels[i] << '\n';
    }
    out << '\n';
  }
}

namespace {

void finish_tag_dataset(TagDataset& d) {
  std::set<std::string> labels;
  for (const auto& s : d.sentences) labels.insert(s.labels.begin(), s.labels.end());
  std::vector<std::string> all(labels.begin(), labels.end());
  d.scheme = !all.empty() && is_bio_label_set(all) ? TagScheme::kBio
                                                   : TagScheme::kFullTag;
  if (d.scheme == TagScheme::kBio) {
    labels.clear();
    for (auto& s : d.sentences) {
      repair_bio(s.labels);
      labels.insert(s.labels.begin(), s.labels.end());
    }
  }
  d.labels = sorted_unique(std::move(labels));
}

}  // namespace

TagDataset load_conll(std::istream& in, std::uint64_t split_seed) {
  TagDataset d;
  d.sentences = read_conll_sentences(in);
  finish_tag_dataset(d);
  d.split = random_split(d.sentences.size(), split_seed);
  return d;
}

TagDataset load_conll(const std::filesystem::path& path,
                      std::uint64_t split_seed) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return load_conll(in, split_seed);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

TagDataset make_tag_dataset(std::vector<TaggedSentence> train,
                            std::vector<TaggedSentence> dev,
                            std::vector<TaggedSentence> test) {
  TagDataset d;
  for (auto* part : {&train, &dev, &test}) {
    auto& idx = part == &train ? d.split.train
                : part == &dev ? d.split.dev
                               : d.split.test;
    for (TaggedSentence& s : *part) {
      idx.push_back(d.sentences.size());
      d.sentences.push_back(std::move(s));
    }
  }
  finish_tag_dataset(d);
  return d;
}

std::size_t SoftmaxProbe::predict(std::span<const float> feature) const {
  std::size_t best = 0;
  double best_score = -INFINITY;
  for (std::size_t l = 0; l < labels.size(); ++l) {
    auto w = weight.row(l);
    double s = bias[l];
    for (std::size_t k = 0; k < feature.size(); ++k) {
      s += static_cast<double>(w[k]) * feature[k];
    }
    if (s > best_score) {
      best_score = s;
      best = l;
    }
  }
  return best;
}

std::vector<float> mention_feature(const EmbeddingModel& model,
                                   const Mention& mention) {
  std::vector<std::vector<float>> vecs;
  for (const std::string& t : mention.tokens) {
    vecs.push_back(model.word_vector(t).values);
  }
  std::size_t i = 0;
  return mean_feature(mention.tokens,
                      [&](const std::string&) -> const std::vector<float>& {
                        return vecs[i++];
                      },
                      static_cast<std::size_t>(model.dim()));
}

SoftmaxProbe train_mention_probe(EmbeddingModel& model,
                                 const MentionDataset& data,
                                 const ProbeOptions& options) {
  if (data.split.train.empty()) throw Error("mention training split is empty");
  SoftmaxProbe probe =
      empty_probe(FeatureKind::kMentionMean, 0, model.dim(), data.labels);
  if (options.epochs <= 0) return probe;

  Rng rng(options.seed);
  std::vector<std::size_t> order = data.split.train;
  std::vector<int> gold(data.examples.size());
  for (std::size_t i = 0; i < data.examples.size(); ++i) {
    gold[i] = data.label_index(data.examples[i].label);
  }
  // Frozen tables allow caching features once.
  std::unordered_map<std::size_t, std::vector<float>> cached;
  auto feature_of = [&](std::size_t idx) -> std::vector<float> {
    if (options.fine_tune) return mention_feature(model, data.examples[idx]);
    auto it = cached.find(idx);
    if (it == cached.end()) {
      it = cached.emplace(idx, mention_feature(model, data.examples[idx])).first;
    }
    return it->second;
  };

  const auto lr = static_cast<float>(options.lr);
  std::vector<float> dx;
  auto run_epoch = [&](SoftmaxProbe& p) {
    rng.shuffle(order);
    for (std::size_t idx : order) {
      const std::vector<float> x = feature_of(idx);
      softmax_step(p, x, gold[idx], lr, options.fine_tune ? &dx : nullptr);
      if (options.fine_tune) {
        const auto& tokens = data.examples[idx].tokens;
        const float inv = 1.0f / static_cast<float>(tokens.size());
        for (float& g : dx) g *= inv;
        for (const std::string& t : tokens) backprop_into_tables(model, t, dx, lr);
      }
    }
  };
  auto dev_accuracy = [&](const SoftmaxProbe& p) {
    std::size_t correct = 0;
    for (std::size_t idx : data.split.dev) {
      correct += p.predict(feature_of(idx)) == static_cast<std::size_t>(gold[idx]);
    }
    return static_cast<double>(correct) / static_cast<double>(data.split.dev.size());
  };
  return fit_with_early_stopping(std::move(probe), options,
                                 !data.split.dev.empty(), run_epoch, dev_accuracy);
}

double eval_mention_accuracy(const SoftmaxProbe& probe,
                             const EmbeddingModel& model,
                             const MentionDataset& data, Split split) {
  const auto& idx = data.split.of(split);
  if (idx.empty()) return 0.0;
  VectorCache cache(model);
  std::size_t correct = 0;
  for (std::size_t i : idx) {
    const Mention& m = data.examples[i];
    const auto f = mean_feature(
        m.tokens, [&](const std::string& t) -> const auto& { return cache.get(t); },
        static_cast<std::size_t>(model.dim()));
    correct += probe.labels[probe.predict(f)] == m.label;
  }
  return static_cast<double>(correct) / static_cast<double>(idx.size());
}

namespace {

std::vector<std::vector<float>> sentence_vectors(const EmbeddingModel& model,
                                                 const TaggedSentence& s,
                                                 VectorCache* cache) {
  std::vector<std::vector<float>> v;
  v.reserve(s.tokens.size());
  for (const std::string& t : s.tokens) {
    v.push_back(cache ? cache->get(t) : model.word_vector(t).values);
  }
  return v;
}

std::vector<std::vector<std::string>> predict_split(const SoftmaxProbe& probe,
                                                    const EmbeddingModel& model,
                                                    const TagDataset& data,
                                                    Split split,
                                                    VectorCache& cache) {
  std::vector<std::vector<std::string>> out;
  const auto dim = static_cast<std::size_t>(model.dim());
  for (std::size_t si : data.split.of(split)) {
    const TaggedSentence& s = data.sentences[si];
    const auto vecs = sentence_vectors(model, s, &cache);
    std::vector<std::string> tags;
    for (std::size_t i = 0; i < s.tokens.size(); ++i) {
      tags.push_back(probe.labels[probe.predict(window_feature(vecs, i, probe.window, dim))]);
    }
    out.push_back(std::move(tags));
  }
  return out;
}

std::vector<std::vector<std::string>> gold_split(const TagDataset& data,
                                                 Split split) {
  std::vector<std::vector<std::string>> out;
  for (std::size_t si : data.split.of(split)) out.push_back(data.sentences[si].labels);
  return out;
}

}  // namespace

SoftmaxProbe train_tagger_probe(EmbeddingModel& model, const TagDataset& data,
                                int window, const ProbeOptions& options) {
  if (window < 0) throw Error("tagger window must be >= 0");
  if (data.split.train.empty()) throw Error("tagging training split is empty");
  const auto dim = static_cast<std::size_t>(model.dim());
  SoftmaxProbe probe =
      empty_probe(FeatureKind::kTokenWindow, window, model.dim(), data.labels);
  if (options.epochs <= 0) return probe;

  Rng rng(options.seed);
  std::vector<std::size_t> order = data.split.train;
  const auto lr = static_cast<float>(options.lr);
  std::vector<float> dx;
  auto run_epoch = [&](SoftmaxProbe& p) {
    VectorCache cache(model);
    rng.shuffle(order);
    for (std::size_t si : order) {
      const TaggedSentence& s = data.sentences[si];
      const auto vecs =
          sentence_vectors(model, s, options.fine_tune ? nullptr : &cache);
      for (std::size_t i = 0; i < s.tokens.size(); ++i) {
        const auto x = window_feature(vecs, i, window, dim);
        softmax_step(p, x, data.label_index(s.labels[i]), lr,
                     options.fine_tune ? &dx : nullptr);
        if (!options.fine_tune) continue;
        for (int o = -window; o <= window; ++o) {
          const auto j = static_cast<std::int64_t>(i) + o;
          if (j < 0 || j >= static_cast<std::int64_t>(s.tokens.size())) continue;
          backprop_into_tables(
              model, s.tokens[j],
              std::span<const float>(dx).subspan((o + window) * dim, dim), lr);
        }
      }
    }
  };
  auto dev_metric = [&](const SoftmaxProbe& p) {
    VectorCache cache(model);
    const auto pred = predict_split(p, model, data, Split::kDev, cache);
    const auto gold = gold_split(data, Split::kDev);
    return data.scheme == TagScheme::kBio ? span_f1(gold, pred).f1
                                          : tag_accuracy(gold, pred);
  };
  return fit_with_early_stopping(std::move(probe), options,
                                 !data.split.dev.empty(), run_epoch, dev_metric);
}

std::vector<std::vector<std::string>> predict_tags(const SoftmaxProbe& probe,
                                                   const EmbeddingModel& model,
                                                   const TagDataset& data,
                                                   Split split) {
  VectorCache cache(model);
  return predict_split(probe, model, data, split, cache);
}

double tag_accuracy(std::span<const std::vector<std::string>> gold,
                    std::span<const std::vector<std::string>> pred) {
  if (gold.size() != pred.size()) throw Error("sentence count mismatch");
  std::size_t total = 0, correct = 0;
  for (std::size_t s = 0; s < gold.size(); ++s) {
    if (gold[s].size() != pred[s].size()) throw Error("sequence length mismatch");
    for (std::size_t i = 0; i < gold[s].size(); ++i) {
      ++total;
      correct += gold[s][i] == pred[s][i];
    }
  }
  return total ? static_cast<double>(correct) / static_cast<double>(total) : 0.0;
}

double eval_tag_accuracy(const SoftmaxProbe& probe, const EmbeddingModel& model,
                         const TagDataset& data, Split split) {
  return tag_accuracy(gold_split(data, split), predict_tags(probe, model, data, split));
}

std::vector<LabeledSpan> decode_spans(std::span<const std::string> labels) {
  std::vector<LabeledSpan> spans;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const std::string& l = labels[i];
    if (l.size() < 3 || l[1] != '-') continue;
    const std::string type = l.substr(2);
    const bool continues = l[0] == 'I' && !spans.empty() &&
                           spans.back().end + 1 == i && spans.back().type == type;
    if (continues) {
      spans.back().end = i;
    } else if (l[0] == 'B' || l[0] == 'I') {
      spans.push_back({i, i, type});
    }
  }
  return spans;
}

namespace {

SpanScores scores_from(std::size_t tp, std::size_t n_pred, std::size_t n_gold) {
  SpanScores s;
  s.precision = n_pred ? static_cast<double>(tp) / static_cast<double>(n_pred) : 0.0;
  s.recall = n_gold ? static_cast<double>(tp) / static_cast<double>(n_gold) : 0.0;
  s.f1 = s.precision + s.recall > 0.0
             ? 2.0 * s.precision * s.recall / (s.precision + s.recall)
             : 0.0;
  return s;
}

std::size_t true_positives(const std::vector<LabeledSpan>& gold,
                           const std::vector<LabeledSpan>& pred) {
  std::size_t tp = 0;
  for (const LabeledSpan& p : pred) {
    tp += std::find(gold.begin(), gold.end(), p) != gold.end();
  }
  return tp;
}

}  // namespace

SpanScores span_f1(std::span<const std::string> gold,
                   std::span<const std::string> pred) {
  if (gold.size() != pred.size()) throw Error("sequence length mismatch");
  const auto g = decode_spans(gold);
  const auto p = decode_spans(pred);
  return scores_from(true_positives(g, p), p.size(), g.size());
}

SpanScores span_f1(std::span<const std::vector<std::string>> gold,
                   std::span<const std::vector<std::string>> pred) {
  if (gold.size() != pred.size()) throw Error("sentence count mismatch");
  std::size_t tp = 0, n_pred = 0, n_gold = 0;
  for (std::size_t s = 0; s < gold.size(); ++s) {
    if (gold[s].size() != pred[s].size()) throw Error("sequence length mismatch");
    const auto g = decode_spans(gold[s]);
    const auto p = decode_spans(pred[s]);
    tp += true_positives(g, p);
    n_pred += p.size();
    n_gold += g.size();
  }
  return scores_from(tp, n_pred, n_gold);
}

SpanScores eval_span_f1(const SoftmaxProbe& probe, const EmbeddingModel& model,
                        const TagDataset& data, Split split) {
  return span_f1(gold_split(data, split), predict_tags(probe, model, data, split));
}

void write_metric_row(std::ostream& out, std::string_view task,
                      std::string_view config, std::string_view split,
                      std::string_view metric, double value) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6f", value);
  out << task << '\t' << config << '\t' << split << '\t' << metric << '\t'
      << buf << '\n';
}

}  // namespace subtok
