#include "subtok/corpus.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "subtok/error.h"
#include "subtok/utf8.h"

namespace subtok {
namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f';
}

}  // namespace

Corpus tokenize_corpus(std::string_view text) {
  utf8::validate(text);
  Corpus corpus;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    Sentence sentence;
    std::size_t i = pos;
    while (i < eol) {
      while (i < eol && is_space(text[i])) ++i;
      std::size_t j = i;
      while (j < eol && !is_space(text[j])) ++j;
      if (j > i) sentence.emplace_back(text.substr(i, j - i));
      i = j;
    }
    if (!sentence.empty()) {
      corpus.token_count += sentence.size();
      corpus.sentences.push_back(std::move(sentence));
    }
    pos = eol + 1;
  }
  return corpus;
}

Corpus read_corpus(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open corpus file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return tokenize_corpus(buf.str());
  } catch (const DecodeError& e) {
    throw DecodeError(path.string() + ": invalid UTF-8", e.offset());
  }
}

Corpus sample_tokens(const Corpus& corpus, std::size_t n) {
  if (n > corpus.token_count) {
    throw InsufficientDataError(n, corpus.token_count);
  }
  Corpus out;
  for (const Sentence& s : corpus.sentences) {
    if (out.token_count == n) break;
    const std::size_t take = std::min(s.size(), n - out.token_count);
    out.sentences.emplace_back(s.begin(), s.begin() + take);
    out.token_count += take;
  }
  return out;
}

Vocab Vocab::build(const Corpus& corpus, std::int64_t min_count) {
  if (min_count < 1) throw Error("min_count must be >= 1");
  std::unordered_map<std::string, std::int64_t> counts;
  for (const Sentence& s : corpus.sentences) {
    for (const std::string& tok : s) ++counts[tok];
  }
  std::vector<std::pair<std::string, std::int64_t>> entries(counts.begin(),
                                                            counts.end());
  return from_counts(std::move(entries), min_count,
                     static_cast<std::int64_t>(corpus.token_count));
}

Vocab Vocab::from_counts(
    std::vector<std::pair<std::string, std::int64_t>> counts,
    std::int64_t min_count, std::int64_t total_tokens) {
  std::erase_if(counts, [&](const auto& e) { return e.second < min_count; });
  if (counts.empty()) {
    throw EmptyVocabError("vocabulary is empty at min_count=" +
                          std::to_string(min_count));
  }
  std::sort(counts.begin(), counts.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  Vocab v;
  v.min_count_ = min_count;
  v.total_tokens_ = total_tokens;
  v.words_.reserve(counts.size());
  v.counts_.reserve(counts.size());
  for (auto& [word, count] : counts) {
    const auto id = static_cast<WordId>(v.words_.size());
    if (!v.index_.emplace(word, id).second) {
      throw FormatError("duplicate vocabulary entry '" + word + "'");
    }
    v.words_.push_back(std::move(word));
    v.counts_.push_back(count);
  }
  return v;
}

WordId Vocab::id(std::string_view word) const {
  auto it = index_.find(word);
  return it == index_.end() ? kNoWord : it->second;
}

void Vocab::write_tsv(std::ostream& out) const {
  for (std::size_t i = 0; i < words_.size(); ++i) {
    out << words_[i] << '\t' << i << '\t' << counts_[i] << '\n';
  }
}

Vocab Vocab::read_tsv(std::istream& in, std::int64_t min_count,
                      std::int64_t total_tokens) {
  std::vector<std::pair<std::string, std::int64_t>> entries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto t1 = line.find('\t');
    const auto t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string::npos) {
      throw FormatError("expected word<TAB>id<TAB>count", line_no);
    }
    try {
      const auto id = std::stoll(line.substr(t1 + 1, t2 - t1 - 1));
      const auto count = std::stoll(line.substr(t2 + 1));
      if (id != static_cast<long long>(entries.size())) {
        throw FormatError("non-contiguous vocabulary id", line_no);
      }
      entries.emplace_back(line.substr(0, t1), count);
    } catch (const std::logic_error&) {
      throw FormatError("bad integer field", line_no);
    }
  }
  Vocab v = from_counts(entries, min_count, total_tokens);
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (v.words_[i] != entries[i].first) {
      throw FormatError("vocabulary ids not in canonical order", i + 1);
    }
  }
  return v;
}

std::vector<double> negative_sampling_weights(const Vocab& vocab,
                                              double power) {
  if (!(power > 0.0)) throw Error("negative sampling power must be > 0");
  if (vocab.empty()) throw EmptyVocabError("vocabulary is empty");
  std::vector<double> w(vocab.size());
  double total = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    w[i] = std::pow(static_cast<double>(vocab.count(i)), power);
    total += w[i];
  }
  for (double& x : w) x /= total;
  return w;
}

std::vector<double> subsample_keep_probs(const Vocab& vocab, double t) {
  std::vector<double> keep(vocab.size(), 1.0);
  if (t <= 0.0) return keep;
  const double total = static_cast<double>(vocab.total_tokens());
  for (std::size_t i = 0; i < keep.size(); ++i) {
    const double f = static_cast<double>(vocab.count(i)) / total;
    keep[i] = std::min(1.0, (std::sqrt(f / t) + 1.0) * t / f);
  }
  return keep;
}

std::string_view to_string(GroupLabel label) {
  switch (label) {
    case GroupLabel::G1:
      return "G1";
    case GroupLabel::G2:
      return "G2";
    case GroupLabel::G3:
      return "G3";
  }
  return "?";
}

DataGroup data_group_for(std::size_t n_tokens) {
  if (n_tokens <= 50'000) return {GroupLabel::G1, 32, 60, 2};
  if (n_tokens <= 500'000) return {GroupLabel::G2, 128, 30, 3};
  return {GroupLabel::G3, 512, 15, 5};
}

}  // namespace subtok
