#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "subtok/corpus.h"

namespace subtok {

struct MorfOptions {
  int max_iters = 10;
  // Weight of the lexicon term (nats per code point).
  double lambda = 1.0;
  double tolerance = 1e-6;
};

// Simplified MDL segmentation model. The cost of a lexicon with morph token
// counts c(m) is
//
//   sum_m c(m) * -log((c(m) + 1) / (N + K)) + lambda * sum_m |m|
//
// with N the number of morph tokens, K the number of morph types and |m| the
// length of m in code points.
struct MorfModel {
  std::map<std::string, std::int64_t> morph_lexicon;
  double corpus_cost = 0.0;
  // cost_trace[0] is the unsegmented starting point, then one entry per pass.
  std::vector<double> cost_trace;
  std::map<std::string, std::vector<std::string>> analyses;
};

MorfModel learn_morfessor_lite(const Vocab& vocab, const MorfOptions& options);

// Total cost of the given morph token counts under the formula above.
double morf_cost(const std::map<std::string, std::int64_t>& lexicon,
                 double lambda);

// Minimum-cost segmentation into lexicon morphs; code points absent from the
// lexicon become singleton morphs with the probability of an unseen morph.
std::vector<std::string> apply_morfessor(const MorfModel& model,
                                         std::string_view word);

// TSV `morph<TAB>count`.
void write_morf(const MorfModel& model, std::ostream& out);
MorfModel read_morf(std::istream& in);

}  // namespace subtok
