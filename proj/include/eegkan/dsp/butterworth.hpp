#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "eegkan/error.hpp"

namespace eegkan::dsp {

/// One second-order section, a0 normalized to 1:
///   H(z) = (b0 + b1 z^-1 + b2 z^-2) / (1 + a1 z^-1 + a2 z^-2)
struct Biquad {
  double b0 = 1, b1 = 0, b2 = 0;
  double a1 = 0, a2 = 0;

  std::complex<double> response(std::complex<double> z_inv) const {
    const auto z_inv2 = z_inv * z_inv;
    return (b0 + b1 * z_inv + b2 * z_inv2) / (1.0 + a1 * z_inv + a2 * z_inv2);
  }

  std::array<std::complex<double>, 2> poles() const {
    const std::complex<double> disc = std::sqrt(std::complex<double>(a1 * a1 - 4.0 * a2));
    return {(-a1 + disc) / 2.0, (-a1 - disc) / 2.0};
  }

  bool operator==(const Biquad&) const = default;
};

struct BandpassDesign {
  int order = 5;
  double low_hz = 0.3;
  double high_hz = 25.0;

  bool operator==(const BandpassDesign&) const = default;
};

/// A cascade of biquads at a fixed sample rate.
struct IirFilter {
  std::vector<Biquad> sections;
  double sample_rate_hz = 0;
  BandpassDesign design;

  std::complex<double> response(double freq_hz) const {
    const double w = 2.0 * std::numbers::pi * freq_hz / sample_rate_hz;
    const auto z_inv = std::polar(1.0, -w);
    std::complex<double> h = 1.0;
    for (const auto& s : sections) h *= s.response(z_inv);
    return h;
  }

  double magnitude(double freq_hz) const { return std::abs(response(freq_hz)); }

  std::vector<std::complex<double>> poles() const {
    std::vector<std::complex<double>> out;
    out.reserve(2 * sections.size());
    for (const auto& s : sections) {
      const auto p = s.poles();
      out.insert(out.end(), p.begin(), p.end());
    }
    return out;
  }

  bool is_stable() const {
    for (const auto& p : poles())
      if (!(std::abs(p) < 1.0)) return false;
    return true;
  }
};

namespace detail {

inline std::complex<double> bilinear(std::complex<double> s, double fs) {
  return (2.0 * fs + s) / (2.0 * fs - s);
}

inline Biquad section_from_poles(std::complex<double> z1, std::complex<double> z2) {
  // Band-pass zeros sit at z = +1 and z = -1, one of each per section.
  Biquad q;
  q.b0 = 1.0;
  q.b1 = 0.0;
  q.b2 = -1.0;
  q.a1 = -(z1 + z2).real();
  q.a2 = (z1 * z2).real();
  return q;
}

}  // namespace detail

/// Digital Butterworth band-pass as a cascade of `order` biquads.
///
/// The analog low-pass prototype is shifted to a band-pass around the
/// pre-warped edges and mapped through the bilinear transform, so the -3 dB
/// points land exactly on `low_hz` and `high_hz`. Sections are ordered by
/// increasing pole radius.
inline IirFilter design_butterworth_bandpass(int order, double low_hz, double high_hz,
                                             double sample_rate_hz) {
  if (order < 1) throw DesignError("order must be >= 1");
  if (!(sample_rate_hz > 0)) throw DesignError("sample rate must be positive");
  if (!(low_hz > 0)) throw DesignError("low cutoff must be positive");
  if (!(low_hz < high_hz)) throw DesignError("low cutoff must be below high cutoff");
  if (!(high_hz < sample_rate_hz / 2.0))
    throw DesignError("high cutoff must be below Nyquist (" + std::to_string(sample_rate_hz / 2.0) +
                      " Hz)");

  const double fs = sample_rate_hz;
  const auto warp = [fs](double f) { return 2.0 * fs * std::tan(std::numbers::pi * f / fs); };
  const double w1 = warp(low_hz);
  const double w2 = warp(high_hz);
  const double bw = w2 - w1;
  const double w0_sq = w1 * w2;

  IirFilter filter;
  filter.sample_rate_hz = fs;
  filter.design = {order, low_hz, high_hz};

  for (int k = 0; k < order; ++k) {
    const double theta = std::numbers::pi * (2.0 * k + order + 1) / (2.0 * order);
    const auto p = std::polar(1.0, theta);
    // Conjugate prototype poles produce the conjugate sections; only the
    // upper half plane and the real pole are expanded.
    if (p.imag() < -1e-12) continue;
    const bool real_pole = std::abs(p.imag()) <= 1e-12;

    const std::complex<double> pl = real_pole ? std::complex<double>(p.real(), 0.0) * (bw / 2.0)
                                              : p * (bw / 2.0);
    const auto d = std::sqrt(pl * pl - w0_sq);
    const auto z1 = detail::bilinear(pl + d, fs);
    const auto z2 = detail::bilinear(pl - d, fs);
    if (real_pole) {
      filter.sections.push_back(detail::section_from_poles(z1, z2));
    } else {
      filter.sections.push_back(detail::section_from_poles(z1, std::conj(z1)));
      filter.sections.push_back(detail::section_from_poles(z2, std::conj(z2)));
    }
  }

  std::stable_sort(filter.sections.begin(), filter.sections.end(),
                   [](const Biquad& a, const Biquad& b) {
                     const auto ra = std::max(std::abs(a.poles()[0]), std::abs(a.poles()[1]));
                     const auto rb = std::max(std::abs(b.poles()[0]), std::abs(b.poles()[1]));
                     return ra < rb;
                   });

  // Unit gain at the digital image of the analog center frequency.
  const double center_hz = fs / std::numbers::pi * std::atan(std::sqrt(w0_sq) / (2.0 * fs));
  const double peak = filter.magnitude(center_hz);
  const double per_section = std::pow(peak, -1.0 / static_cast<double>(filter.sections.size()));
  for (auto& s : filter.sections) {
    s.b0 *= per_section;
    s.b1 *= per_section;
    s.b2 *= per_section;
  }
  return filter;
}

}  // namespace eegkan::dsp
