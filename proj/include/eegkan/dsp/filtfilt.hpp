#pragma once

#include <algorithm>
#include <array>
#include <span>
#include <string>
#include <vector>

#include "eegkan/dsp/butterworth.hpp"
#include "eegkan/error.hpp"

namespace eegkan::dsp {

using SectionState = std::array<double, 2>;

/// Runs the cascade in place (transposed direct form II), updating `state`.
inline void sosfilt_inplace(const IirFilter& filter, std::span<double> x,
                            std::span<SectionState> state) {
  for (std::size_t s = 0; s < filter.sections.size(); ++s) {
    const auto& q = filter.sections[s];
    auto& z = state[s];
    for (double& v : x) {
      const double in = v;
      const double out = q.b0 * in + z[0];
      z[0] = q.b1 * in - q.a1 * out + z[1];
      z[1] = q.b2 * in - q.a2 * out;
      v = out;
    }
  }
}

inline std::vector<double> sosfilt(const IirFilter& filter, std::span<const double> x) {
  std::vector<double> y(x.begin(), x.end());
  std::vector<SectionState> state(filter.sections.size(), SectionState{0.0, 0.0});
  sosfilt_inplace(filter, y, state);
  return y;
}

/// Steady-state section states for a unit step input, scaled through the
/// cascade by the DC gain of the preceding sections.
inline std::vector<SectionState> sosfilt_zi(const IirFilter& filter) {
  std::vector<SectionState> zi;
  zi.reserve(filter.sections.size());
  double scale = 1.0;
  for (const auto& q : filter.sections) {
    const double dc = (q.b0 + q.b1 + q.b2) / (1.0 + q.a1 + q.a2);
    const double z1 = q.b2 - q.a2 * dc;
    const double z0 = q.b1 - q.a1 * dc + z1;
    zi.push_back({scale * z0, scale * z1});
    scale *= dc;
  }
  return zi;
}

/// Samples added on each side of the signal before zero-phase filtering.
inline std::size_t filtfilt_padding(const IirFilter& filter) {
  return 3 * 2 * filter.sections.size();
}

/// Zero-phase forward-backward filtering. The signal is extended by odd
/// reflection about its end points and each pass starts from the steady
/// state matching its first sample, which suppresses edge transients.
inline std::vector<double> filtfilt(const IirFilter& filter, std::span<const double> signal) {
  const std::size_t pad = filtfilt_padding(filter);
  const std::size_t n = signal.size();
  if (n <= 3 * pad)
    throw SignalTooShort("signal of " + std::to_string(n) + " samples needs more than " +
                         std::to_string(3 * pad));

  std::vector<double> ext;
  ext.reserve(n + 2 * pad);
  for (std::size_t i = pad; i >= 1; --i) ext.push_back(2.0 * signal[0] - signal[i]);
  ext.insert(ext.end(), signal.begin(), signal.end());
  for (std::size_t i = 1; i <= pad; ++i) ext.push_back(2.0 * signal[n - 1] - signal[n - 1 - i]);

  const auto zi = sosfilt_zi(filter);
  auto run = [&](std::vector<double>& data) {
    std::vector<SectionState> state = zi;
    const double x0 = data.front();
    for (auto& z : state) {
      z[0] *= x0;
      z[1] *= x0;
    }
    sosfilt_inplace(filter, data, state);
  };

  run(ext);
  std::reverse(ext.begin(), ext.end());
  run(ext);
  std::reverse(ext.begin(), ext.end());

  return {ext.begin() + static_cast<std::ptrdiff_t>(pad),
          ext.begin() + static_cast<std::ptrdiff_t>(pad + n)};
}

}  // namespace eegkan::dsp
