#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "eegkan/dataset/features.hpp"
#include "eegkan/dataset/synth.hpp"
#include "eegkan/experiment/sweep.hpp"
#include "eegkan/nn/spec.hpp"

namespace eegkan::cli {

// Bad flags, bad config files and violated preconditions: exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SynthSettings {
  std::size_t n_per_class = 20;
  double noise = 1.0;
  double duration_s = 12.0;
  double sample_rate_hz = 256.0;
  std::vector<dataset::ClassProfile> profiles = dataset::SynthConfig{}.profiles;
  std::vector<std::string> channels = dataset::SynthConfig{}.channel_names;
};

struct TrainSettings {
  nn::ModelKind kind = nn::ModelKind::ANN;
  std::size_t epochs = 500;
  double lr = 0.01;
  std::size_t nodes = 16;
};

struct RunConfig {
  std::uint64_t seed = 42;
  std::filesystem::path out = ".";
  std::size_t jobs = 0;  // 0 = available parallelism
  std::vector<std::string> channels = dataset::default_channels();
  dataset::PipelineConfig pipeline;
  double dropout = 0.5;
  nn::KanConfig kan;
  experiment::SweepGrid grid;
  experiment::Objective objective = experiment::Objective::test_loss;
  double test_frac = 0.2;
  bool with_gender = false;
  bool record_timing = false;
  SynthSettings synth;
  TrainSettings train;

  std::size_t effective_jobs() const;
  /// Model template for a dataset with `input_dim` features.
  nn::ModelSpec model_spec(nn::ModelKind kind, std::size_t input_dim, std::size_t nodes) const;
  dataset::SynthConfig synth_config() const;
};

/// Applies a JSON document on top of `cfg`. Unknown keys and mistyped
/// values raise UsageError naming the offending key.
void apply_json(RunConfig& cfg, const nlohmann::json& doc);
RunConfig load_config(const std::filesystem::path& path, RunConfig base = {});

/// Checks every module precondition up front so no command starts work on
/// a configuration that would fail halfway.
void validate(const RunConfig& cfg);

nlohmann::json to_json(const RunConfig& cfg);

}  // namespace eegkan::cli
