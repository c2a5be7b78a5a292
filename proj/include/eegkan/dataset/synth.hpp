#pragma once

#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>
#include <vector>

#include "eegkan/dataset/features.hpp"
#include "eegkan/dataset/recording.hpp"
#include "eegkan/error.hpp"
#include "eegkan/rng.hpp"

namespace eegkan::dataset {

/// Per-band sinusoid amplitudes (microvolts) for one class, in the order of
/// the configured bands.
struct ClassProfile {
  Label label = Label::HC;
  std::vector<double> band_amplitude;
};

struct SynthConfig {
  std::size_t n_per_class = 20;
  std::vector<ClassProfile> profiles = {
      {Label::AD, {8.0, 3.0, 2.0, 0.5}},
      {Label::HC, {3.0, 8.0, 3.0, 0.5}},
  };
  double noise_level = 1.0;
  double sample_rate_hz = 256.0;
  double duration_s = 12.0;
  std::uint64_t seed = 42;
  std::vector<std::string> channel_names = {"Fz", "F3", "F4", "T7", "T8", "Cz", "Pz"};
  std::vector<dsp::Band> bands = PipelineConfig{}.bands;
  std::size_t components_per_band = 2;
};

/// Generates a deterministic synthetic corpus. Each channel is a sum of
/// sinusoids with random frequencies inside each band, scaled by the class
/// profile, a per-subject band factor in [0.75, 1.25] and a per-channel
/// factor in [0.8, 1.2], plus Gaussian white noise of `noise_level` std.
inline std::vector<Recording> synthesize_dataset(const SynthConfig& cfg) {
  if (cfg.n_per_class < 1) throw InvalidArgument("n_per_class must be >= 1");
  if (cfg.profiles.empty()) throw InvalidProfile("no class profiles given");
  if (!(cfg.sample_rate_hz > 0) || !(cfg.duration_s > 0))
    throw InvalidArgument("sample rate and duration must be positive");
  if (!(cfg.noise_level >= 0)) throw InvalidProfile("noise level must be >= 0");
  for (const auto& p : cfg.profiles) {
    if (p.band_amplitude.size() != cfg.bands.size())
      throw InvalidProfile("profile for " + std::string(to_string(p.label)) + " has " +
                           std::to_string(p.band_amplitude.size()) + " amplitudes, expected " +
                           std::to_string(cfg.bands.size()));
    for (double a : p.band_amplitude)
      if (!(a >= 0)) throw InvalidProfile("band amplitudes must be non-negative");
  }
  for (const auto& b : cfg.bands)
    if (!(b.high_hz <= cfg.sample_rate_hz / 2))
      throw InvalidProfile("band " + b.name + " extends past Nyquist");

  const auto n = static_cast<std::size_t>(std::llround(cfg.sample_rate_hz * cfg.duration_s));
  Rng rng(cfg.seed);
  std::vector<Recording> out;
  out.reserve(cfg.profiles.size() * cfg.n_per_class);

  for (const auto& profile : cfg.profiles) {
    for (std::size_t s = 0; s < cfg.n_per_class; ++s) {
      Recording rec;
      char id[64];
      std::snprintf(id, sizeof(id), "synth-%s-%03zu", to_string(profile.label), s + 1);
      rec.subject_id = id;
      rec.label = profile.label;
      rec.gender = rng.bernoulli(0.5) ? Gender::F : Gender::M;
      rec.age = std::round(rng.uniform(55.0, 85.0));
      rec.sample_rate_hz = cfg.sample_rate_hz;

      std::vector<double> subject_factor(cfg.bands.size());
      for (auto& f : subject_factor) f = rng.uniform(0.75, 1.25);

      for (const auto& name : cfg.channel_names) {
        Channel ch{name, std::vector<double>(n, 0.0)};
        for (std::size_t b = 0; b < cfg.bands.size(); ++b) {
          const double amp = profile.band_amplitude[b] * subject_factor[b] * rng.uniform(0.8, 1.2);
          for (std::size_t k = 0; k < cfg.components_per_band; ++k) {
            const double freq = rng.uniform(cfg.bands[b].low_hz, cfg.bands[b].high_hz);
            const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
            const double w = 2.0 * std::numbers::pi * freq / cfg.sample_rate_hz;
            for (std::size_t t = 0; t < n; ++t)
              ch.samples[t] += amp * std::sin(w * static_cast<double>(t) + phase);
          }
        }
        for (auto& v : ch.samples) v += rng.normal(0.0, cfg.noise_level);
        rec.channels.push_back(std::move(ch));
      }
      out.push_back(std::move(rec));
    }
  }
  return out;
}

}  // namespace eegkan::dataset
