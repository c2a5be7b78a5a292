#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "eegkan/error.hpp"

namespace eegkan::nn {

inline std::vector<double> softmax(std::span<const double> logits) {
  const double m = *std::max_element(logits.begin(), logits.end());
  std::vector<double> p(logits.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) sum += (p[i] = std::exp(logits[i] - m));
  for (auto& v : p) v /= sum;
  return p;
}

struct LossGrad {
  double loss = 0;
  std::vector<double> dlogits;
};

/// Softmax cross-entropy with max-subtraction; the gradient is
/// softmax(logits) - onehot(label).
inline LossGrad cross_entropy(std::span<const double> logits, int label) {
  if (logits.empty() || label < 0 || static_cast<std::size_t>(label) >= logits.size())
    throw IndexOutOfRange("label " + std::to_string(label) + " for " +
                          std::to_string(logits.size()) + " logits");
  const double m = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double z : logits) sum += std::exp(z - m);
  const double log_sum = m + std::log(sum);

  LossGrad out;
  out.loss = log_sum - logits[static_cast<std::size_t>(label)];
  out.dlogits.resize(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) out.dlogits[i] = std::exp(logits[i] - log_sum);
  out.dlogits[static_cast<std::size_t>(label)] -= 1.0;
  return out;
}

/// Index of the largest logit; ties go to the lowest index.
inline int argmax(std::span<const double> logits) {
  return static_cast<int>(std::max_element(logits.begin(), logits.end()) - logits.begin());
}

}  // namespace eegkan::nn
