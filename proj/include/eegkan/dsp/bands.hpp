#pragma once

#include <array>
#include <string>

#include "eegkan/dsp/welch.hpp"
#include "eegkan/error.hpp"

namespace eegkan::dsp {

/// A half-open frequency interval [low_hz, high_hz).
struct Band {
  std::string name;
  double low_hz = 0;
  double high_hz = 0;

  bool contains(double f) const { return low_hz <= f && f < high_hz; }
  bool operator==(const Band&) const = default;
};

/// theta, alpha, beta, gamma. Gamma is capped at 45 Hz to stay below mains.
inline std::array<Band, 4> canonical_bands() {
  return {Band{"theta", 4.0, 8.0}, Band{"alpha", 8.0, 13.0}, Band{"beta", 13.0, 30.0},
          Band{"gamma", 30.0, 45.0}};
}

/// Mean of the PSD bins falling inside the band.
inline double band_power(const PsdEstimate& psd, const Band& band) {
  if (!(band.low_hz < band.high_hz)) throw EmptyBand("band '" + band.name + "' has low >= high");
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t k = 0; k < psd.freqs_hz.size(); ++k) {
    if (band.contains(psd.freqs_hz[k])) {
      sum += psd.power[k];
      ++count;
    }
  }
  if (count == 0) throw EmptyBand("no PSD bins fall in band '" + band.name + "'");
  return sum / static_cast<double>(count);
}

}  // namespace eegkan::dsp
