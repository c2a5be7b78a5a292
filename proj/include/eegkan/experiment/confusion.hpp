#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "eegkan/dataset/dataset.hpp"
#include "eegkan/error.hpp"
#include "eegkan/nn/loss.hpp"
#include "eegkan/nn/model.hpp"

namespace eegkan::experiment {

/// counts[true][predicted].
struct ConfusionMatrix {
  std::vector<std::vector<std::size_t>> counts;
  std::vector<std::string> class_names;

  std::size_t total() const {
    std::size_t t = 0;
    for (const auto& row : counts)
      for (auto c : row) t += c;
    return t;
  }

  std::size_t trace() const {
    std::size_t t = 0;
    for (std::size_t i = 0; i < counts.size(); ++i) t += counts[i][i];
    return t;
  }

  double accuracy() const {
    const auto n = total();
    return n == 0 ? 0.0 : static_cast<double>(trace()) / static_cast<double>(n);
  }
};

/// Eval-mode argmax predictions; logit ties go to the lowest class index.
inline ConfusionMatrix confusion(const nn::ModelParams& params, const nn::ModelSpec& spec,
                                 const dataset::Dataset& test) {
  const std::size_t k = spec.output_dim;
  ConfusionMatrix cm;
  cm.counts.assign(k, std::vector<std::size_t>(k, 0));
  cm.class_names = test.class_names;
  cm.class_names.resize(k);
  for (std::size_t i = 0; i < k; ++i)
    if (cm.class_names[i].empty()) cm.class_names[i] = "class" + std::to_string(i);
  for (const auto& r : test.rows) {
    if (r.label_index < 0 || static_cast<std::size_t>(r.label_index) >= k)
      throw DimensionMismatch("label " + std::to_string(r.label_index) + " outside " +
                              std::to_string(k) + " model outputs");
    const auto out = nn::forward(spec, params, r.features, nn::Mode::eval);
    ++cm.counts[static_cast<std::size_t>(r.label_index)][static_cast<std::size_t>(nn::argmax(out.logits))];
  }
  return cm;
}

}  // namespace eegkan::experiment
