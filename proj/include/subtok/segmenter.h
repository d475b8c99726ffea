#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "subtok/bpe.h"
#include "subtok/corpus.h"
#include "subtok/morfessor.h"

namespace subtok {

enum class SegmenterKind { kMorf, kBpe, kCharNgram, kWord };

std::string_view to_string(SegmenterKind kind);
SegmenterKind parse_segmenter_kind(std::string_view name);

struct CharNgramRange {
  int n_min = 3;
  int n_max = 6;
};

// The word itself as its only subword; reduces the model to plain skip-gram.
struct WholeWord {};

struct Segmentation {
  std::string word;
  std::vector<std::string> subwords;
  // When set, the last element of `subwords` is the word-token entry and
  // lives in the word-token namespace of the subword vocabulary.
  bool includes_word_token = false;

  std::size_t subword_count() const {
    return subwords.size() - (includes_word_token ? 1 : 0);
  }
};

class Segmenter {
 public:
  using Model = std::variant<MorfModel, BpeModel, CharNgramRange, WholeWord>;

  Segmenter() : model_(WholeWord{}) {}
  explicit Segmenter(Model model) : model_(std::move(model)) {}

  SegmenterKind kind() const;
  const Model& model() const { return model_; }

  std::vector<std::string> split(std::string_view word) const;
  Segmentation segment(std::string_view word, bool include_word_token) const;

  void write(std::ostream& out) const;
  static Segmenter read(SegmenterKind kind, std::istream& in);
  void save(const std::filesystem::path& path) const;
  static Segmenter load(SegmenterKind kind, const std::filesystem::path& path);

 private:
  Model model_;
};

enum class KeySpace : std::uint8_t { kSubword = 0, kWordToken = 1 };

using SubwordId = std::int32_t;
inline constexpr SubwordId kNoSubword = -1;

// Dense ids for subword strings and word-token entries. The two key spaces
// are disjoint: "cat" as a subword and "cat" as a word token get two ids.
class SubwordVocab {
 public:
  SubwordId add(KeySpace space, std::string_view text);
  SubwordId id(KeySpace space, std::string_view text) const;

  std::size_t size() const { return keys_.size(); }
  KeySpace space(SubwordId id) const { return keys_[id].first; }
  const std::string& text(SubwordId id) const { return keys_[id].second; }

  // Ids for each element of a segmentation, kNoSubword where unknown.
  std::vector<SubwordId> lookup(const Segmentation& seg) const;

  // TSV `space<TAB>text<TAB>id` where space is `s` or `w`.
  void write_tsv(std::ostream& out) const;
  static SubwordVocab read_tsv(std::istream& in);

  bool operator==(const SubwordVocab& other) const {
    return keys_ == other.keys_;
  }

 private:
  static std::string key(KeySpace space, std::string_view text);

  std::vector<std::pair<KeySpace, std::string>> keys_;
  std::unordered_map<std::string, SubwordId> index_;
};

// Union of all segmentations over the vocabulary in word-id order; ids are
// assigned by first occurrence.
SubwordVocab build_subword_vocab(const Vocab& vocab, const Segmenter& segmenter,
                                 bool include_word_token);

}  // namespace subtok
