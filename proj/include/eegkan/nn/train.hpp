#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "eegkan/dataset/dataset.hpp"
#include "eegkan/error.hpp"
#include "eegkan/nn/adam.hpp"
#include "eegkan/nn/loss.hpp"
#include "eegkan/nn/model.hpp"
#include "eegkan/nn/spec.hpp"
#include "eegkan/rng.hpp"

namespace eegkan::nn {

struct TrainConfig {
  std::size_t epochs = 100;
  double lr = 0.001;
  std::uint64_t seed = 1;

  bool operator==(const TrainConfig&) const = default;
};

struct Evaluation {
  double loss = 0;
  double accuracy = 0;
};

struct TrainReport {
  std::vector<double> epoch_losses;  // mean train-mode loss per epoch
  double train_loss = 0;             // final epoch
  double test_loss = 0;
  double test_accuracy = 0;
  std::uint64_t seed = 0;
  ModelSpec spec;
  TrainConfig config;

  bool operator==(const TrainReport&) const = default;
};

/// Eval-mode mean cross-entropy and argmax accuracy.
inline Evaluation evaluate(const ModelSpec& spec, const ModelParams& params,
                           const dataset::Dataset& data) {
  if (data.rows.empty()) throw EmptyDataset("cannot evaluate on an empty dataset");
  Evaluation ev;
  std::size_t correct = 0;
  for (const auto& r : data.rows) {
    const auto out = forward(spec, params, r.features, Mode::eval);
    ev.loss += cross_entropy(out.logits, r.label_index).loss;
    if (argmax(out.logits) == r.label_index) ++correct;
  }
  ev.loss /= static_cast<double>(data.rows.size());
  ev.accuracy = static_cast<double>(correct) / static_cast<double>(data.rows.size());
  return ev;
}

/// Full-batch Adam training. Parameters come from `init_params(spec, seed)`
/// and dropout masks from stream 2 of the same seed, so a call is a pure
/// function of its arguments. Throws Diverged on a non-finite loss.
inline std::pair<ModelParams, TrainReport> train(const ModelSpec& spec,
                                                 const dataset::Dataset& train_set,
                                                 const dataset::Dataset& test_set,
                                                 const TrainConfig& cfg) {
  spec.validate();
  if (cfg.epochs < 1) throw InvalidEpochs("epochs must be >= 1");
  if (train_set.rows.empty()) throw EmptyDataset("training set is empty");
  if (train_set.feature_dim() != spec.input_dim)
    throw DimensionMismatch("training features have " + std::to_string(train_set.feature_dim()) +
                            " columns, model expects " + std::to_string(spec.input_dim));

  ModelParams params = init_params(spec, cfg.seed);
  AdamState adam(params.values.size());
  Rng dropout_rng = Rng::for_stream(cfg.seed, 2);

  TrainReport report;
  report.seed = cfg.seed;
  report.spec = spec;
  report.config = cfg;
  report.epoch_losses.reserve(cfg.epochs);

  const double inv_n = 1.0 / static_cast<double>(train_set.rows.size());
  std::vector<double> grads(params.values.size());
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::fill(grads.begin(), grads.end(), 0.0);
    double loss_sum = 0.0;
    for (const auto& r : train_set.rows) {
      const auto out = forward(spec, params, r.features, Mode::train, &dropout_rng);
      const auto lg = cross_entropy(out.logits, r.label_index);
      loss_sum += lg.loss;
      backward_accumulate(spec, params, out.cache, lg.dlogits, grads);
    }
    const double mean_loss = loss_sum * inv_n;
    if (!std::isfinite(mean_loss))
      throw Diverged("non-finite training loss at epoch " + std::to_string(epoch + 1));
    report.epoch_losses.push_back(mean_loss);
    for (auto& g : grads) g *= inv_n;
    adam_step(params.values, grads, adam, cfg.lr);
  }

  report.train_loss = report.epoch_losses.back();
  if (!test_set.rows.empty()) {
    const auto ev = evaluate(spec, params, test_set);
    if (!std::isfinite(ev.loss)) throw Diverged("non-finite test loss");
    report.test_loss = ev.loss;
    report.test_accuracy = ev.accuracy;
  }
  return {std::move(params), std::move(report)};
}

}  // namespace eegkan::nn
