#include "subtok/morfessor.h"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <unordered_map>

#include "subtok/error.h"
#include "subtok/utf8.h"

namespace subtok {
namespace {

// Morph counts plus the aggregates needed to evaluate the cost in O(1):
// cost = N log(N + K) - sum_m c(m) log(c(m) + 1) + lambda * L.
class Lexicon {
 public:
  explicit Lexicon(double lambda) : lambda_(lambda) {}

  void add(const std::string& morph, std::int64_t f) {
    auto [it, inserted] = counts_.try_emplace(morph, 0);
    if (inserted) {
      ++types_;
      chars_ += static_cast<double>(utf8::length(morph));
    }
    weighted_ -= term(it->second);
    it->second += f;
    weighted_ += term(it->second);
    tokens_ += f;
  }

  void remove(const std::string& morph, std::int64_t f) {
    auto it = counts_.find(morph);
    weighted_ -= term(it->second);
    it->second -= f;
    tokens_ -= f;
    if (it->second == 0) {
      --types_;
      chars_ -= static_cast<double>(utf8::length(morph));
      counts_.erase(it);
    } else {
      weighted_ += term(it->second);
    }
  }

  double cost() const {
    if (tokens_ == 0) return 0.0;
    const double n = static_cast<double>(tokens_);
    return n * std::log(n + static_cast<double>(types_)) - weighted_ +
           lambda_ * chars_;
  }

  const std::unordered_map<std::string, std::int64_t>& counts() const {
    return counts_;
  }

 private:
  static double term(std::int64_t c) {
    return c == 0 ? 0.0 : static_cast<double>(c) * std::log1p(c);
  }

  double lambda_;
  std::unordered_map<std::string, std::int64_t> counts_;
  std::int64_t tokens_ = 0;
  std::int64_t types_ = 0;
  double chars_ = 0.0;
  double weighted_ = 0.0;
};

std::string join(const std::vector<std::string>& cps, std::size_t from,
                 std::size_t to) {
  std::string s;
  for (std::size_t i = from; i < to; ++i) s += cps[i];
  return s;
}

// Top-down binary splitting of `morph`, which must not currently be counted.
// Adds the chosen analysis to the lexicon and appends it to `out`.
void split_node(Lexicon& lex, const std::string& morph, std::int64_t f,
                std::vector<std::string>& out) {
  const std::vector<std::string> cps = utf8::code_points(morph);
  lex.add(morph, f);
  double best_cost = lex.cost();
  lex.remove(morph, f);
  std::size_t best_split = 0;
  for (std::size_t i = 1; i < cps.size(); ++i) {
    const std::string left = join(cps, 0, i);
    const std::string right = join(cps, i, cps.size());
    lex.add(left, f);
    lex.add(right, f);
    const double c = lex.cost();
    lex.remove(right, f);
    lex.remove(left, f);
    if (c < best_cost) {
      best_cost = c;
      best_split = i;
    }
  }
  if (best_split == 0) {
    lex.add(morph, f);
    out.push_back(morph);
    return;
  }
  const std::string left = join(cps, 0, best_split);
  const std::string right = join(cps, best_split, cps.size());
  // Each half is re-split with its sibling's contribution in place.
  lex.add(right, f);
  split_node(lex, left, f, out);
  lex.remove(right, f);
  split_node(lex, right, f, out);
}

}  // namespace

double morf_cost(const std::map<std::string, std::int64_t>& lexicon,
                 double lambda) {
  double n = 0.0;
  double k = 0.0;
  double chars = 0.0;
  for (const auto& [m, c] : lexicon) {
    if (c <= 0) continue;
    n += static_cast<double>(c);
    k += 1.0;
    chars += static_cast<double>(utf8::length(m));
  }
  double cost = lambda * chars;
  for (const auto& [m, c] : lexicon) {
    if (c <= 0) continue;
    cost -= static_cast<double>(c) *
            std::log((static_cast<double>(c) + 1.0) / (n + k));
  }
  return cost;
}

MorfModel learn_morfessor_lite(const Vocab& vocab,
                               const MorfOptions& options) {
  if (vocab.empty()) throw EmptyVocabError("cannot learn segmenter on empty vocab");
  if (options.max_iters < 1) throw Error("max_iters must be >= 1");

  Lexicon lex(options.lambda);
  std::vector<std::vector<std::string>> analyses(vocab.size());
  for (std::size_t w = 0; w < vocab.size(); ++w) {
    analyses[w] = {vocab.word(w)};
    lex.add(vocab.word(w), vocab.count(w));
  }

  MorfModel model;
  model.cost_trace.push_back(lex.cost());
  for (int iter = 0; iter < options.max_iters; ++iter) {
    for (std::size_t w = 0; w < vocab.size(); ++w) {
      const std::int64_t f = vocab.count(w);
      const double before = lex.cost();
      for (const auto& m : analyses[w]) lex.remove(m, f);
      std::vector<std::string> fresh;
      split_node(lex, vocab.word(w), f, fresh);
      if (lex.cost() > before) {
        // Greedy splitting may miss the previous analysis; never go uphill.
        for (const auto& m : fresh) lex.remove(m, f);
        for (const auto& m : analyses[w]) lex.add(m, f);
      } else {
        analyses[w] = std::move(fresh);
      }
    }
    const double cost = lex.cost();
    const double prev = model.cost_trace.back();
    model.cost_trace.push_back(cost);
    if (prev - cost < options.tolerance) break;
  }

  model.corpus_cost = model.cost_trace.back();
  for (const auto& [m, c] : lex.counts()) model.morph_lexicon.emplace(m, c);
  for (std::size_t w = 0; w < vocab.size(); ++w) {
    model.analyses.emplace(vocab.word(w), std::move(analyses[w]));
  }
  return model;
}

std::vector<std::string> apply_morfessor(const MorfModel& model,
                                         std::string_view word) {
  const std::vector<std::string> cps = utf8::code_points(word);
  double n = 0.0;
  std::size_t max_len = 1;
  for (const auto& [m, c] : model.morph_lexicon) {
    n += static_cast<double>(c);
    max_len = std::max(max_len, utf8::length(m));
  }
  const double denom = n + static_cast<double>(model.morph_lexicon.size());
  const double unseen = denom > 0.0 ? std::log(denom) : 0.0;

  const std::size_t len = cps.size();
  std::vector<double> best(len + 1, std::numeric_limits<double>::infinity());
  std::vector<std::size_t> back(len + 1, 0);
  best[0] = 0.0;
  for (std::size_t end = 1; end <= len; ++end) {
    const std::size_t lo = end > max_len ? end - max_len : 0;
    for (std::size_t start = lo; start < end; ++start) {
      if (!std::isfinite(best[start])) continue;
      const std::string piece = join(cps, start, end);
      double c;
      auto it = model.morph_lexicon.find(piece);
      if (it != model.morph_lexicon.end()) {
        c = std::log(denom) - std::log1p(static_cast<double>(it->second));
      } else if (end - start == 1) {
        c = unseen;
      } else {
        continue;
      }
      // Strict comparison keeps the earliest start, i.e. the longest final
      // morph, on ties.
      if (best[start] + c < best[end]) {
        best[end] = best[start] + c;
        back[end] = start;
      }
    }
  }
  std::vector<std::string> out;
  for (std::size_t end = len; end > 0; end = back[end]) {
    out.push_back(join(cps, back[end], end));
  }
  std::reverse(out.begin(), out.end());
  return out;
}

void write_morf(const MorfModel& model, std::ostream& out) {
  for (const auto& [m, c] : model.morph_lexicon) out << m << '\t' << c << '\n';
}

MorfModel read_morf(std::istream& in) {
  MorfModel model;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0) {
      throw FormatError("expected morph<TAB>count", line_no);
    }
    std::int64_t count;
    try {
      count = std::stoll(line.substr(tab + 1));
    } catch (const std::logic_error&) {
      throw FormatError("bad morph count", line_no);
    }
    if (count <= 0) throw FormatError("morph count must be positive", line_no);
    model.morph_lexicon[line.substr(0, tab)] = count;
  }
  model.corpus_cost = morf_cost(model.morph_lexicon, 1.0);
  return model;
}

}  // namespace subtok
