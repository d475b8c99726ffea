#include "subtok/char_ngram.h"

#include "subtok/error.h"
#include "subtok/utf8.h"

namespace subtok {

std::vector<std::string> char_ngrams(std::string_view word, int n_min,
                                     int n_max) {
  if (n_min < 1 || n_max < n_min) throw Error("invalid n-gram range");
  std::vector<std::string> cps = utf8::code_points(word);
  cps.insert(cps.begin(), "<");
  cps.emplace_back(">");
  const int len = static_cast<int>(cps.size());
  std::vector<std::string> out;
  for (int n = n_min; n <= n_max && n <= len; ++n) {
    for (int i = 0; i + n <= len; ++i) {
      std::string gram;
      for (int j = i; j < i + n; ++j) gram += cps[j];
      out.push_back(std::move(gram));
    }
  }
  return out;
}

}  // namespace subtok
