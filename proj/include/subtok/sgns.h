#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "subtok/corpus.h"
#include "subtok/matrix.h"
#include "subtok/model.h"

namespace subtok {

inline constexpr double kDotClamp = 30.0;

template <typename T>
T clamp_dot(T x) {
  return std::clamp<T>(x, static_cast<T>(-kDotClamp), static_cast<T>(kDotClamp));
}

// log(1 + exp(-x)), i.e. -log sigmoid(x), without overflow.
template <typename T>
T neg_log_sigmoid(T x) {
  return x >= 0 ? std::log1p(std::exp(-x)) : -x + std::log1p(std::exp(x));
}

template <typename T>
T sigmoid(T x) {
  return x >= 0 ? 1 / (1 + std::exp(-x)) : std::exp(x) / (1 + std::exp(x));
}

template <typename T>
T dot(std::span<const T> a, std::span<const T> b) {
  T s{};
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

// -log s(v.c+) - sum_j log s(-v.c-_j), dot products clamped to [-30, 30].
template <typename T>
T sgns_loss(std::span<const T> target, WordId positive,
            std::span<const WordId> negatives, const BasicMatrix<T>& context) {
  T loss = neg_log_sigmoid(clamp_dot(dot<T>(target, context.row(positive))));
  for (WordId n : negatives) {
    loss += neg_log_sigmoid(-clamp_dot(dot<T>(target, context.row(n))));
  }
  return loss;
}

// Loss and gradients in one pass. Adds dL/dv to `target_grad` and reports
// dL/dc for each context row as `coeff * v` through sink(id, coeff).
template <typename T, typename ContextSink>
T sgns_backward(std::span<const T> target, WordId positive,
                std::span<const WordId> negatives,
                const BasicMatrix<T>& context, std::span<T> target_grad,
                ContextSink&& sink) {
  auto visit = [&](WordId id, bool is_positive) {
    auto c = context.row(id);
    const T s = clamp_dot(dot<T>(target, c));
    // d/ds -log s(s) = s(s) - 1;  d/ds -log s(-s) = s(s).
    const T g = is_positive ? sigmoid(s) - 1 : sigmoid(s);
    for (std::size_t k = 0; k < target_grad.size(); ++k) target_grad[k] += g * c[k];
    sink(id, g);
    return is_positive ? neg_log_sigmoid(s) : neg_log_sigmoid(-s);
  };
  T loss = visit(positive, true);
  for (WordId n : negatives) loss += visit(n, false);
  return loss;
}

}  // namespace subtok
