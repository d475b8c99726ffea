#include "subtok/random.h"

#include <algorithm>

namespace subtok {

DiscreteSampler::DiscreteSampler(std::span<const double> probs) {
  cdf_.reserve(probs.size());
  double acc = 0.0;
  for (double p : probs) {
    acc += p;
    cdf_.push_back(acc);
  }
  for (double& c : cdf_) c /= acc;
  if (!cdf_.empty()) cdf_.back() = 1.0;
}

std::size_t DiscreteSampler::sample(Rng& rng) const {
  const double u = rng.uniform();
  auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  if (it == cdf_.end()) --it;
  return static_cast<std::size_t>(it - cdf_.begin());
}

}  // namespace subtok
