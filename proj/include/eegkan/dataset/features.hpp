#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "eegkan/dataset/recording.hpp"
#include "eegkan/dsp.hpp"

namespace eegkan::dataset {

/// Default electrodes: frontal midline and lateral plus the two temporal sites.
inline std::vector<std::string> default_channels() { return {"Fz", "F3", "F4", "T7", "T8"}; }

struct PipelineConfig {
  dsp::BandpassDesign filter{5, 0.3, 25.0};
  dsp::WelchConfig welch{};
  std::vector<dsp::Band> bands = [] {
    const auto b = dsp::canonical_bands();
    return std::vector<dsp::Band>(b.begin(), b.end());
  }();
};

inline int label_index(Label l) { return l == Label::AD ? 0 : 1; }

inline int gender_index(Gender g) {
  switch (g) {
    case Gender::M: return 0;
    case Gender::F: return 1;
    default: return 2;
  }
}

/// Per-subject feature vector, channel-major and band-minor.
struct FeatureRow {
  std::string subject_id;
  int label_index = 0;
  int gender_index = 2;
  std::vector<double> features;

  bool operator==(const FeatureRow&) const = default;
};

/// Band-passes each channel with zero phase, estimates its Welch PSD and
/// takes the mean density in every band.
inline FeatureRow extract_features(const Recording& rec, const PipelineConfig& cfg = {}) {
  const auto filter = dsp::design_butterworth_bandpass(cfg.filter.order, cfg.filter.low_hz,
                                                       cfg.filter.high_hz, rec.sample_rate_hz);
  FeatureRow row;
  row.subject_id = rec.subject_id;
  row.label_index = label_index(rec.label);
  row.gender_index = gender_index(rec.gender);
  row.features.reserve(rec.channels.size() * cfg.bands.size());
  for (const auto& ch : rec.channels) {
    const auto filtered = dsp::filtfilt(filter, ch.samples);
    const auto psd = dsp::welch_psd(filtered, rec.sample_rate_hz, cfg.welch);
    for (const auto& band : cfg.bands) row.features.push_back(dsp::band_power(psd, band));
  }
  return row;
}

}  // namespace eegkan::dataset
