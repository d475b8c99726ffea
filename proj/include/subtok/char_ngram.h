#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace subtok {

// All n-grams (in code points) of `<word>` for n in [n_min, n_max], grouped
// by ascending n and left to right within each n. Duplicates are kept.
std::vector<std::string> char_ngrams(std::string_view word, int n_min,
                                     int n_max);

}  // namespace subtok
