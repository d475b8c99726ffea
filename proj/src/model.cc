#include "subtok/model.h"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "subtok/error.h"
#include "subtok/random.h"

namespace subtok {

std::string ModelConfig::segmenter_label() const {
  switch (segmenter) {
    case SegmenterKind::kBpe:
      if (merges == 1'000) return "bpe1e3";
      if (merges == 10'000) return "bpe1e4";
      if (merges == 100'000) return "bpe1e5";
      return "bpe" + std::to_string(merges);
    case SegmenterKind::kCharNgram:
      return "charn";
    case SegmenterKind::kMorf:
      return "morf";
    case SegmenterKind::kWord:
      return "word";
  }
  return "?";
}

std::string ModelConfig::label() const {
  return segmenter_label() + (word_token ? "/w+" : "/w-") +
         (position ? "/p+" : "/p-") + "/add";
}

void ModelConfig::validate() const {
  if (dim < 1) throw Error("dim must be >= 1");
  if (max_positions < 1) throw Error("max_positions must be >= 1");
  if (segmenter == SegmenterKind::kBpe && merges < 1) {
    throw Error("merges must be >= 1");
  }
  if (segmenter == SegmenterKind::kCharNgram &&
      (ngram_min < 1 || ngram_max < ngram_min)) {
    throw Error("invalid n-gram range");
  }
  if (segmenter == SegmenterKind::kMorf && morf_iters < 1) {
    throw Error("morf_iters must be >= 1");
  }
}

KeyValues ModelConfig::to_key_values() const {
  return {
      {"segmenter", std::string(to_string(segmenter))},
      {"merges", std::to_string(merges)},
      {"ngram_min", std::to_string(ngram_min)},
      {"ngram_max", std::to_string(ngram_max)},
      {"morf_iters", std::to_string(morf_iters)},
      {"word_token", word_token ? "true" : "false"},
      {"position", position ? "true" : "false"},
      {"composition", "add"},
      {"dim", std::to_string(dim)},
      {"max_positions", std::to_string(max_positions)},
      {"seed", std::to_string(seed)},
  };
}

ModelConfig ModelConfig::from_key_values(const KeyValues& kv) {
  ModelConfig c;
  if (kv.count("segmenter")) {
    c.segmenter = parse_segmenter_kind(kv_string(kv, "segmenter"));
  }
  if (kv.count("merges")) c.merges = kv_int(kv, "merges");
  if (kv.count("ngram_min")) c.ngram_min = kv_int(kv, "ngram_min");
  if (kv.count("ngram_max")) c.ngram_max = kv_int(kv, "ngram_max");
  if (kv.count("morf_iters")) c.morf_iters = kv_int(kv, "morf_iters");
  if (kv.count("word_token")) c.word_token = kv_bool(kv, "word_token");
  if (kv.count("position")) c.position = kv_bool(kv, "position");
  if (kv.count("composition") && kv_string(kv, "composition") != "add") {
    throw FormatError("only composition=add is supported");
  }
  if (kv.count("dim")) c.dim = kv_int(kv, "dim");
  if (kv.count("max_positions")) c.max_positions = kv_int(kv, "max_positions");
  if (kv.count("seed")) c.seed = kv_int(kv, "seed");
  c.validate();
  return c;
}

ModelConfig ModelConfig::from_label(std::string_view label) {
  ModelConfig c;
  if (label == "w2v") {
    c.segmenter = SegmenterKind::kWord;
    return c;
  }
  if (label == "ft") {
    c.word_token = true;
    return c;
  }
  std::vector<std::string_view> parts;
  std::size_t pos = 0;
  while (true) {
    const auto slash = label.find('/', pos);
    parts.push_back(label.substr(pos, slash == std::string_view::npos ? slash : slash - pos));
    if (slash == std::string_view::npos) break;
    pos = slash + 1;
  }
  const std::string_view seg = parts[0];
  if (seg.rfind("bpe", 0) == 0) {
    c.segmenter = SegmenterKind::kBpe;
    const std::string_view n = seg.substr(3);
    if (n == "1e3") {
      c.merges = 1'000;
    } else if (n == "1e4") {
      c.merges = 10'000;
    } else if (n == "1e5") {
      c.merges = 100'000;
    } else if (!n.empty() && n.find_first_not_of("0123456789") == std::string_view::npos) {
      c.merges = std::stoull(std::string(n));
    } else if (!n.empty()) {
      throw Error("bad config label '" + std::string(label) + "'");
    }
  } else {
    c.segmenter = parse_segmenter_kind(seg);
  }
  for (std::size_t i = 1; i < parts.size(); ++i) {
    const std::string_view p = parts[i];
    if (p == "w+" || p == "w-") {
      c.word_token = p == "w+";
    } else if (p == "p+" || p == "p-") {
      c.position = p == "p+";
    } else if (p != "add") {
      throw Error("bad config label '" + std::string(label) + "'");
    }
  }
  c.validate();
  return c;
}

Segmenter make_segmenter(const ModelConfig& config, const Vocab& vocab) {
  config.validate();
  switch (config.segmenter) {
    case SegmenterKind::kBpe:
      return Segmenter(learn_bpe(vocab, config.merges));
    case SegmenterKind::kMorf: {
      MorfOptions opts;
      opts.max_iters = config.morf_iters;
      return Segmenter(learn_morfessor_lite(vocab, opts));
    }
    case SegmenterKind::kCharNgram:
      return Segmenter(CharNgramRange{config.ngram_min, config.ngram_max});
    case SegmenterKind::kWord:
      break;
  }
  return Segmenter(WholeWord{});
}

ParamTables init_params(const ModelConfig& config, std::size_t subword_rows,
                        std::size_t vocab_rows) {
  config.validate();
  if (subword_rows == 0 || vocab_rows == 0) {
    throw EmptyVocabError("cannot initialise parameters for empty vocabularies");
  }
  const auto d = static_cast<std::size_t>(config.dim);
  ParamTables p{Matrix(subword_rows, d),
                Matrix(static_cast<std::size_t>(config.max_positions), d),
                Matrix(vocab_rows, static_cast<std::size_t>(config.context_dim()))};
  Rng rng(config.seed);
  const double bound = 0.5 / config.dim;
  for (float& x : p.subword.data()) x = static_cast<float>(rng.uniform(-bound, bound));
  for (float& x : p.position.data()) x = static_cast<float>(rng.uniform(-bound, bound));
  return p;
}

std::vector<ComposeTerm> compose_plan(const Segmentation& seg,
                                      const SubwordVocab& subwords,
                                      const ModelConfig& config) {
  const std::vector<SubwordId> ids = subwords.lookup(seg);
  const std::size_t n = seg.subword_count();
  std::vector<ComposeTerm> plan;
  plan.reserve(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] == kNoSubword) continue;
    int pos = -1;
    if (config.position && i < n) {
      pos = std::min(static_cast<int>(i), config.max_positions - 1);
    }
    plan.push_back({ids[i], pos});
  }
  return plan;
}

ComposedVector compose_word(const ParamTables& params, const Segmentation& seg,
                            const SubwordVocab& subwords,
                            const ModelConfig& config) {
  const auto plan = compose_plan(seg, subwords, config);
  ComposedVector out;
  out.values.assign(params.subword.cols(), 0.0f);
  out.all_unknown = plan.empty();
  compose_into<float>(params, plan, out.values);
  return out;
}

EmbeddingModel::EmbeddingModel(ModelConfig config, Vocab vocab,
                               Segmenter segmenter, SubwordVocab subwords,
                               ParamTables params)
    : config_(std::move(config)),
      vocab_(std::move(vocab)),
      segmenter_(std::move(segmenter)),
      subwords_(std::move(subwords)),
      params_(std::move(params)) {
  const auto d = static_cast<std::size_t>(config_.dim);
  if (params_.subword.rows() != subwords_.size() ||
      params_.context.rows() != vocab_.size() ||
      params_.position.rows() != static_cast<std::size_t>(config_.max_positions) ||
      params_.subword.cols() != d || params_.position.cols() != d ||
      params_.context.cols() != d) {
    throw FormatError("parameter table shapes do not match the vocabularies");
  }
  plans_.reserve(vocab_.size());
  for (const std::string& w : vocab_.words()) plans_.push_back(plan(w));
}

EmbeddingModel EmbeddingModel::create(const ModelConfig& config, Vocab vocab,
                                      Segmenter segmenter) {
  SubwordVocab sv = build_subword_vocab(vocab, segmenter, config.word_token);
  ParamTables params = init_params(config, sv.size(), vocab.size());
  return EmbeddingModel(config, std::move(vocab), std::move(segmenter),
                        std::move(sv), std::move(params));
}

std::vector<ComposeTerm> EmbeddingModel::plan(std::string_view word) const {
  return compose_plan(segmenter_.segment(word, config_.word_token), subwords_,
                      config_);
}

ComposedVector EmbeddingModel::word_vector(std::string_view word) const {
  return compose_word(params_, segmenter_.segment(word, config_.word_token),
                      subwords_, config_);
}

void EmbeddingModel::save(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  KeyValues kv = config_.to_key_values();
  kv["vocab_min_count"] = std::to_string(vocab_.min_count());
  kv["vocab_total_tokens"] = std::to_string(vocab_.total_tokens());
  auto write_text = [&](const char* name, auto&& fn) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw IoError("cannot write " + (dir / name).string());
    fn(out);
    if (!out) throw IoError("write failed for " + (dir / name).string());
  };
  write_text("config.txt", [&](std::ostream& o) { write_key_values(kv, o); });
  write_text("vocab.tsv", [&](std::ostream& o) { vocab_.write_tsv(o); });
  write_text("subwords.tsv", [&](std::ostream& o) { subwords_.write_tsv(o); });
  segmenter_.save(dir / "segmenter.model");
  save_matrix(params_.subword, dir / "subword.mat");
  save_matrix(params_.position, dir / "position.mat");
  save_matrix(params_.context, dir / "context.mat");
}

EmbeddingModel EmbeddingModel::load(const std::filesystem::path& dir) {
  const KeyValues kv = load_key_values(dir / "config.txt");
  ModelConfig config = ModelConfig::from_key_values(kv);
  std::ifstream vin(dir / "vocab.tsv", std::ios::binary);
  if (!vin) throw IoError("cannot open " + (dir / "vocab.tsv").string());
  Vocab vocab = Vocab::read_tsv(vin, kv_int(kv, "vocab_min_count"),
                                kv_int(kv, "vocab_total_tokens"));
  std::ifstream sin(dir / "subwords.tsv", std::ios::binary);
  if (!sin) throw IoError("cannot open " + (dir / "subwords.tsv").string());
  SubwordVocab sv = SubwordVocab::read_tsv(sin);
  Segmenter seg = Segmenter::load(config.segmenter, dir / "segmenter.model");
  ParamTables params{load_matrix(dir / "subword.mat"),
                     load_matrix(dir / "position.mat"),
                     load_matrix(dir / "context.mat")};
  return EmbeddingModel(std::move(config), std::move(vocab), std::move(seg),
                        std::move(sv), std::move(params));
}

void export_vectors(const EmbeddingModel& model, std::ostream& out) {
  const Vocab& vocab = model.vocab();
  if (vocab.empty()) throw EmptyVocabError("refusing to export an empty vocabulary");
  const auto d = static_cast<std::size_t>(model.dim());
  out << vocab.size() << ' ' << d << '\n';
  std::vector<float> v(d);
  char buf[64];
  for (std::size_t w = 0; w < vocab.size(); ++w) {
    compose_into<float>(model.params(), model.plan(static_cast<WordId>(w)), v);
    out << vocab.word(w);
    for (float x : v) {
      std::snprintf(buf, sizeof buf, " %.6f", static_cast<double>(x));
      out << buf;
    }
    out << '\n';
  }
}

void export_vectors(const EmbeddingModel& model,
                    const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  export_vectors(model, out);
  if (!out) throw IoError("write failed for " + path.string());
}

WordVectors import_vectors(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("missing vector header", 1);
  std::size_t rows = 0, cols = 0;
  {
    std::istringstream header(line);
    if (!(header >> rows >> cols) || cols == 0) {
      throw FormatError("expected header '<count> <dim>'", 1);
    }
  }
  WordVectors wv{{}, Matrix(rows, cols)};
  for (std::size_t r = 0; r < rows; ++r) {
    if (!std::getline(in, line)) throw FormatError("missing vector line", r + 2);
    std::istringstream ls(line);
    std::string word;
    ls >> word;
    for (std::size_t c = 0; c < cols; ++c) {
      if (!(ls >> wv.vectors.at(r, c))) {
        throw FormatError("too few vector components", r + 2);
      }
    }
    wv.words.push_back(std::move(word));
  }
  return wv;
}

}  // namespace subtok
