#pragma once

#include <filesystem>
#include <iosfwd>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "subtok/corpus.h"

namespace subtok {

inline constexpr std::string_view kEndOfWord = "</w>";

using SymbolPair = std::pair<std::string, std::string>;

// Merge table learned over a word-frequency dictionary. Words are split into
// code points followed by the `</w>` marker before merging.
struct BpeModel {
  std::vector<SymbolPair> merges;
  std::size_t num_merges = 0;
  // Symbols of the training words after all merges. Empty for models loaded
  // from disk.
  std::set<std::string> symbol_vocab;
};

// Greedy merging of the most frequent adjacent pair (frequency-weighted),
// ties to the lexicographically smallest pair. Stops after num_merges merges
// or once no pair occurs at least twice.
BpeModel learn_bpe(const Vocab& vocab, std::size_t num_merges);

std::vector<std::string> apply_bpe(const BpeModel& model,
                                   std::string_view word);

// Merges every non-overlapping occurrence of `pair`, scanning left to right.
void merge_pair(std::vector<std::string>& symbols, const SymbolPair& pair);

// `#bpe v1 <num_merges>` followed by one `left right` line per merge.
void write_bpe(const BpeModel& model, std::ostream& out);
BpeModel read_bpe(std::istream& in);

}  // namespace subtok
