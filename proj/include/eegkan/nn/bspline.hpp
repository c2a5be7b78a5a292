#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "eegkan/error.hpp"
#include "eegkan/nn/spec.hpp"

namespace eegkan::nn {

/// Uniform knot vector over [lo, hi] with `intervals` interior spans,
/// extended by `degree` knots on each side.
struct KnotGrid {
  std::vector<double> knots;
  int degree = 3;
  int intervals = 5;
  double lo = -2.0;
  double hi = 2.0;

  static KnotGrid uniform(int intervals, int degree, double lo, double hi) {
    if (intervals < 1 || degree < 1 || degree > KanConfig::max_degree || !(lo < hi))
      throw InvalidArgument("invalid knot grid");
    KnotGrid g;
    g.degree = degree;
    g.intervals = intervals;
    g.lo = lo;
    g.hi = hi;
    const double step = (hi - lo) / intervals;
    for (int j = -degree; j <= intervals + degree; ++j) g.knots.push_back(lo + j * step);
    // Pin the range ends so clamped inputs hit them exactly.
    g.knots[static_cast<std::size_t>(degree)] = lo;
    g.knots[static_cast<std::size_t>(degree + intervals)] = hi;
    return g;
  }

  static KnotGrid from(const KanConfig& c) {
    return uniform(c.grid_size, c.spline_degree, c.grid_lo, c.grid_hi);
  }

  std::size_t n_basis() const { return knots.size() - static_cast<std::size_t>(degree) - 1; }

  double clamp(double x) const { return std::clamp(x, lo, hi); }

  /// Knot span s with knots[s] <= x < knots[s+1]; the right end of the range
  /// belongs to the last interior span.
  std::size_t span(double x) const {
    const double step = (hi - lo) / intervals;
    auto idx = static_cast<long>(std::floor((x - lo) / step));
    idx = std::clamp<long>(idx, 0, intervals - 1);
    auto s = static_cast<std::size_t>(idx + degree);
    // Guard against rounding in the floor above.
    while (s > static_cast<std::size_t>(degree) && x < knots[s]) --s;
    while (s + 1 < static_cast<std::size_t>(degree + intervals) && x >= knots[s + 1]) ++s;
    return s;
  }
};

/// Non-zero B-spline values (and derivatives) at one point: basis function
/// `first + r` has value `value[r]` for r in [0, degree].
struct SplineEval {
  std::size_t first = 0;
  std::array<double, KanConfig::max_degree + 1> value{};
  std::array<double, KanConfig::max_degree + 1> deriv{};
  bool clamped = false;
};

namespace detail {

// Cox-de Boor triangle for the non-zero basis functions of degree p at span s.
inline void basis_at_span(const KnotGrid& g, std::size_t s, int p, double x,
                          std::array<double, KanConfig::max_degree + 1>& out) {
  std::array<double, KanConfig::max_degree + 1> left{}, right{};
  out[0] = 1.0;
  for (int j = 1; j <= p; ++j) {
    left[j] = x - g.knots[s + 1 - j];
    right[j] = g.knots[s + j] - x;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      const double tmp = out[r] / (right[r + 1] + left[j - r]);
      out[r] = saved + right[r + 1] * tmp;
      saved = left[j - r] * tmp;
    }
    out[j] = saved;
  }
}

}  // namespace detail

/// Evaluates the basis at clamp(x). Derivatives are with respect to the
/// unclamped input and therefore vanish outside the grid range.
inline SplineEval evaluate_spline_basis(const KnotGrid& g, double x) {
  SplineEval e;
  const double xc = g.clamp(x);
  e.clamped = (x < g.lo) || (x > g.hi);
  const int p = g.degree;
  const std::size_t s = g.span(xc);
  e.first = s - static_cast<std::size_t>(p);
  detail::basis_at_span(g, s, p, xc, e.value);

  if (e.clamped) return e;
  std::array<double, KanConfig::max_degree + 1> lower{};
  detail::basis_at_span(g, s, p - 1, xc, lower);
  // lower[r] is basis (s - p + 1 + r) of degree p - 1.
  for (int r = 0; r <= p; ++r) {
    const std::size_t i = e.first + static_cast<std::size_t>(r);
    const double a = (r >= 1) ? lower[r - 1] : 0.0;  // N_{i, p-1}
    const double b = (r < p) ? lower[r] : 0.0;       // N_{i+1, p-1}
    double d = 0.0;
    if (a != 0.0) d += a / (g.knots[i + p] - g.knots[i]);
    if (b != 0.0) d -= b / (g.knots[i + p + 1] - g.knots[i + 1]);
    e.deriv[r] = p * d;
  }
  return e;
}

/// Full basis vector of length n_basis() at clamp(x).
inline std::vector<double> bspline_basis(const KnotGrid& g, double x) {
  std::vector<double> out(g.n_basis(), 0.0);
  const auto e = evaluate_spline_basis(g, x);
  for (int r = 0; r <= g.degree; ++r) out[e.first + static_cast<std::size_t>(r)] = e.value[r];
  return out;
}

}  // namespace eegkan::nn
