#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "eegkan/error.hpp"

namespace eegkan::dsp {

enum class Window { hann };

struct WelchConfig {
  std::size_t segment_len = 256;
  double overlap = 0.5;
  Window window = Window::hann;

  bool operator==(const WelchConfig&) const = default;
};

/// One-sided power spectral density, units of (signal units)^2 / Hz.
struct PsdEstimate {
  std::vector<double> freqs_hz;
  std::vector<double> power;
  double resolution_hz = 0;

  /// Rectangle-rule integral of the density; approximates the variance.
  double total_power() const {
    return std::accumulate(power.begin(), power.end(), 0.0) * resolution_hz;
  }
};

/// Periodic Hann window (DFT-even), as used for spectral estimation.
inline std::vector<double> hann_window(std::size_t n) {
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i)
    w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                static_cast<double>(n));
  return w;
}

namespace detail {

inline bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// In-place iterative radix-2 FFT.
inline void fft_pow2(std::vector<std::complex<double>>& a) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = -2.0 * std::numbers::pi / static_cast<double>(len);
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t k = 0; k < len / 2; ++k) {
        const auto w = std::polar(1.0, ang * static_cast<double>(k));
        const auto u = a[i + k];
        const auto v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
      }
    }
  }
}

/// |X_k|^2 for k = 0..n/2 of a real sequence.
inline std::vector<double> one_sided_power(std::span<const double> x) {
  const std::size_t n = x.size();
  const std::size_t bins = n / 2 + 1;
  std::vector<double> out(bins);
  if (is_pow2(n)) {
    std::vector<std::complex<double>> a(x.begin(), x.end());
    fft_pow2(a);
    for (std::size_t k = 0; k < bins; ++k) out[k] = std::norm(a[k]);
    return out;
  }
  for (std::size_t k = 0; k < bins; ++k) {
    std::complex<double> acc = 0;
    for (std::size_t t = 0; t < n; ++t)
      acc += x[t] * std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>((k * t) % n) /
                                        static_cast<double>(n));
    out[k] = std::norm(acc);
  }
  return out;
}

}  // namespace detail

/// Welch's averaged modified periodogram. Each segment is mean-detrended and
/// windowed; the result is one-sided with density scaling so that the
/// integral over frequency approximates the signal variance.
inline PsdEstimate welch_psd(std::span<const double> signal, double sample_rate_hz,
                             const WelchConfig& cfg = {}) {
  const std::size_t seg = cfg.segment_len;
  if (seg < 8) throw InvalidSegmentation("segment length must be >= 8");
  if (seg > signal.size())
    throw InvalidSegmentation("segment length " + std::to_string(seg) + " exceeds signal length " +
                              std::to_string(signal.size()));
  if (!(cfg.overlap >= 0.0 && cfg.overlap < 1.0))
    throw InvalidSegmentation("overlap fraction must lie in [0, 1)");
  if (!(sample_rate_hz > 0)) throw InvalidSegmentation("sample rate must be positive");

  const auto overlap = static_cast<std::size_t>(std::floor(static_cast<double>(seg) * cfg.overlap));
  const std::size_t step = seg - overlap;
  const std::size_t n_segments = (signal.size() - seg) / step + 1;

  const auto window = hann_window(seg);
  const double window_power = std::inner_product(window.begin(), window.end(), window.begin(), 0.0);
  const double scale = 1.0 / (sample_rate_hz * window_power);

  const std::size_t bins = seg / 2 + 1;
  std::vector<double> acc(bins, 0.0);
  std::vector<double> buf(seg);
  for (std::size_t s = 0; s < n_segments; ++s) {
    const auto chunk = signal.subspan(s * step, seg);
    const double mean = std::accumulate(chunk.begin(), chunk.end(), 0.0) / static_cast<double>(seg);
    for (std::size_t i = 0; i < seg; ++i) buf[i] = (chunk[i] - mean) * window[i];
    const auto p = detail::one_sided_power(buf);
    for (std::size_t k = 0; k < bins; ++k) acc[k] += p[k];
  }

  PsdEstimate out;
  out.resolution_hz = sample_rate_hz / static_cast<double>(seg);
  out.freqs_hz.resize(bins);
  out.power.resize(bins);
  // DC and (for even lengths) Nyquist have no mirrored counterpart.
  const std::size_t last_doubled = (seg % 2 == 0) ? bins - 1 : bins;
  for (std::size_t k = 0; k < bins; ++k) {
    out.freqs_hz[k] = static_cast<double>(k) * out.resolution_hz;
    double v = acc[k] * scale / static_cast<double>(n_segments);
    if (k > 0 && k < last_doubled) v *= 2.0;
    out.power[k] = v;
  }
  return out;
}

}  // namespace eegkan::dsp
