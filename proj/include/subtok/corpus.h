#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace subtok {

using Sentence = std::vector<std::string>;

struct Corpus {
  std::vector<Sentence> sentences;
  std::size_t token_count = 0;
};

// One sentence per line, tokens separated by runs of ASCII whitespace.
// Empty lines are skipped. Throws DecodeError on invalid UTF-8.
Corpus tokenize_corpus(std::string_view text);
Corpus read_corpus(const std::filesystem::path& path);

// Contiguous prefix of exactly n tokens; the last sentence is truncated.
Corpus sample_tokens(const Corpus& corpus, std::size_t n);

using WordId = std::int32_t;
inline constexpr WordId kNoWord = -1;

// Word types with frequency >= min_count. Ids run 0..size()-1 in descending
// count order with ties broken by byte-wise string order.
class Vocab {
 public:
  Vocab() = default;

  static Vocab build(const Corpus& corpus, std::int64_t min_count);
  // Rebuilds from (word, count) pairs, re-deriving the canonical id order.
  static Vocab from_counts(
      std::vector<std::pair<std::string, std::int64_t>> counts,
      std::int64_t min_count, std::int64_t total_tokens);

  std::size_t size() const { return words_.size(); }
  bool empty() const { return words_.empty(); }

  WordId id(std::string_view word) const;
  bool contains(std::string_view word) const { return id(word) != kNoWord; }
  const std::string& word(WordId id) const { return words_[id]; }
  std::int64_t count(WordId id) const { return counts_[id]; }

  const std::vector<std::string>& words() const { return words_; }
  const std::vector<std::int64_t>& counts() const { return counts_; }
  std::int64_t min_count() const { return min_count_; }
  // Token count of the corpus the vocabulary was built from, including
  // tokens of words below the threshold.
  std::int64_t total_tokens() const { return total_tokens_; }

  // TSV lines `word<TAB>id<TAB>count`.
  void write_tsv(std::ostream& out) const;
  static Vocab read_tsv(std::istream& in, std::int64_t min_count,
                        std::int64_t total_tokens);

  bool operator==(const Vocab& other) const {
    return words_ == other.words_ && counts_ == other.counts_;
  }

 private:
  struct StringHash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const {
      return std::hash<std::string_view>{}(s);
    }
  };

  std::vector<std::string> words_;
  std::vector<std::int64_t> counts_;
  std::unordered_map<std::string, WordId, StringHash, std::equal_to<>> index_;
  std::int64_t min_count_ = 1;
  std::int64_t total_tokens_ = 0;
};

// P(w) = count(w)^power / sum(count^power), indexed by word id.
std::vector<double> negative_sampling_weights(const Vocab& vocab,
                                              double power = 0.75);

// Keep probability min(1, (sqrt(f/t) + 1) * t / f), f the relative frequency.
std::vector<double> subsample_keep_probs(const Vocab& vocab, double t);

enum class GroupLabel { G1, G2, G3 };

struct DataGroup {
  GroupLabel label;
  int batch_size;
  int epochs;
  int min_count;

  bool operator==(const DataGroup&) const = default;
};

std::string_view to_string(GroupLabel label);

// [10K, 50K] -> G1, (50K, 500K] -> G2, (500K, 5M] -> G3; sizes outside the
// grid clamp to the nearest group.
DataGroup data_group_for(std::size_t n_tokens);

}  // namespace subtok
