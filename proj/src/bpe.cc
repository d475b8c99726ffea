#include "subtok/bpe.h"

#include <cstdint>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "subtok/error.h"
#include "subtok/utf8.h"

namespace subtok {
namespace {

std::vector<std::string> initial_symbols(std::string_view word) {
  std::vector<std::string> symbols = utf8::code_points(word);
  symbols.emplace_back(kEndOfWord);
  return symbols;
}

bool has_pair(const std::vector<std::string>& symbols, const SymbolPair& p) {
  for (std::size_t i = 0; i + 1 < symbols.size(); ++i) {
    if (symbols[i] == p.first && symbols[i + 1] == p.second) return true;
  }
  return false;
}

// Pair statistics with O(log n) access to the current best pair.
class PairTable {
 public:
  void add(const SymbolPair& pair, std::int64_t delta) {
    auto [it, inserted] = counts_.try_emplace(pair, 0);
    if (!inserted) ranked_.erase({-it->second, pair});
    it->second += delta;
    if (it->second == 0) {
      counts_.erase(it);
    } else {
      ranked_.insert({-it->second, pair});
    }
  }

  // Highest count, smallest pair on ties. Requires !empty().
  std::pair<std::int64_t, const SymbolPair*> best() const {
    const auto& top = *ranked_.begin();
    return {-top.first, &top.second};
  }

  bool empty() const { return ranked_.empty(); }

 private:
  std::map<SymbolPair, std::int64_t> counts_;
  std::set<std::pair<std::int64_t, SymbolPair>> ranked_;
};

}  // namespace

void merge_pair(std::vector<std::string>& symbols, const SymbolPair& pair) {
  std::size_t out = 0;
  for (std::size_t i = 0; i < symbols.size(); ++i) {
    if (i + 1 < symbols.size() && symbols[i] == pair.first &&
        symbols[i + 1] == pair.second) {
      symbols[out++] = pair.first + pair.second;
      ++i;
    } else {
      if (out != i) symbols[out] = std::move(symbols[i]);
      ++out;
    }
  }
  symbols.resize(out);
}

BpeModel learn_bpe(const Vocab& vocab, std::size_t num_merges) {
  if (vocab.empty()) throw EmptyVocabError("cannot learn BPE on empty vocab");
  if (num_merges < 1) throw Error("num_merges must be >= 1");

  std::vector<std::vector<std::string>> words;
  words.reserve(vocab.size());
  for (const std::string& w : vocab.words()) words.push_back(initial_symbols(w));

  PairTable table;
  std::map<SymbolPair, std::vector<std::size_t>> occurrences;
  auto count_word = [&](std::size_t w, std::int64_t sign) {
    const auto& sym = words[w];
    const std::int64_t freq = vocab.count(static_cast<WordId>(w));
    for (std::size_t i = 0; i + 1 < sym.size(); ++i) {
      SymbolPair p{sym[i], sym[i + 1]};
      if (sign > 0) occurrences[p].push_back(w);
      table.add(p, sign * freq);
    }
  };
  for (std::size_t w = 0; w < words.size(); ++w) count_word(w, +1);

  BpeModel model;
  model.num_merges = num_merges;
  while (model.merges.size() < num_merges && !table.empty()) {
    auto [count, best_ptr] = table.best();
    if (count < 2) break;
    const SymbolPair best = *best_ptr;
    // Occurrence lists may hold stale or repeated entries; has_pair filters.
    std::vector<std::size_t> touched = std::move(occurrences[best]);
    occurrences.erase(best);
    std::sort(touched.begin(), touched.end());
    touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
    for (std::size_t w : touched) {
      if (!has_pair(words[w], best)) continue;
      count_word(w, -1);
      merge_pair(words[w], best);
      count_word(w, +1);
    }
    model.merges.push_back(best);
  }
  for (const auto& sym : words) {
    model.symbol_vocab.insert(sym.begin(), sym.end());
  }
  return model;
}

std::vector<std::string> apply_bpe(const BpeModel& model,
                                   std::string_view word) {
  std::vector<std::string> symbols = initial_symbols(word);
  if (model.merges.empty()) return symbols;

  // Replaying merges in order is equivalent to repeatedly applying the
  // lowest-ranked applicable merge that comes after the last one applied.
  std::map<SymbolPair, std::size_t> rank;
  for (std::size_t r = 0; r < model.merges.size(); ++r) {
    rank.try_emplace(model.merges[r], r);
  }
  std::size_t next_rank = 0;
  while (symbols.size() > 1) {
    std::size_t best = std::numeric_limits<std::size_t>::max();
    for (std::size_t i = 0; i + 1 < symbols.size(); ++i) {
      auto it = rank.find({symbols[i], symbols[i + 1]});
      if (it != rank.end() && it->second >= next_rank && it->second < best) {
        best = it->second;
      }
    }
    if (best == std::numeric_limits<std::size_t>::max()) break;
    merge_pair(symbols, model.merges[best]);
    next_rank = best + 1;
  }
  return symbols;
}

void write_bpe(const BpeModel& model, std::ostream& out) {
  out << "#bpe v1 " << model.num_merges << '\n';
  for (const auto& [l, r] : model.merges) out << l << ' ' << r << '\n';
}

BpeModel read_bpe(std::istream& in) {
  BpeModel model;
  std::string line;
  if (!std::getline(in, line)) throw FormatError("empty BPE model file", 1);
  {
    std::istringstream header(line);
    std::string tag, version;
    if (!(header >> tag >> version >> model.num_merges) || tag != "#bpe" ||
        version != "v1") {
      throw FormatError("expected header '#bpe v1 <num_merges>'", 1);
    }
  }
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto sp = line.find(' ');
    if (sp == std::string::npos || sp == 0 || sp + 1 == line.size() ||
        line.find(' ', sp + 1) != std::string::npos) {
      throw FormatError("expected 'left right'", line_no);
    }
    model.merges.emplace_back(line.substr(0, sp), line.substr(sp + 1));
  }
  if (model.merges.size() > model.num_merges) {
    throw FormatError("more merges than declared in header");
  }
  return model;
}

}  // namespace subtok
