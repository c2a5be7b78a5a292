#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "eegkan/error.hpp"
#include "eegkan/nn/bspline.hpp"
#include "eegkan/nn/spec.hpp"
#include "eegkan/rng.hpp"

namespace eegkan::nn {

// Flat parameter layouts (all row-major):
//
//   ANN:  W1[h][d], b1[h], W2[o][h], b2[o]
//   KAN:  layer1 edge[h][d], layer2 edge[o][h]; every edge stores
//         coeff[grid_size + degree], base_weight, spline_scale
//
// Checkpoints serialize `values` in exactly this order.
struct ModelParams {
  std::vector<double> values;

  bool operator==(const ModelParams&) const = default;
};

enum class Mode { train, eval };

namespace detail {

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }
inline double silu(double x) { return x * sigmoid(x); }
inline double silu_grad(double x) {
  const double s = sigmoid(x);
  return s * (1.0 + x * (1.0 - s));
}

struct AnnOffsets {
  std::size_t w1, b1, w2, b2;
};

inline AnnOffsets ann_offsets(const ModelSpec& s) {
  const auto d = s.input_dim, h = s.hidden_nodes, o = s.output_dim;
  return {0, h * d, h * d + h, h * d + h + o * h};
}

inline std::size_t kan_layer2_offset(const ModelSpec& s) {
  return s.input_dim * s.hidden_nodes * s.kan.params_per_edge();
}

}  // namespace detail

/// Deterministic initialization. ANN weights ~ U(-1/sqrt(fan_in),
/// 1/sqrt(fan_in)) with zero biases; KAN spline coefficients ~ N(0, 0.1^2)
/// with base_weight = spline_scale = 1. Draws use stream 1 of `seed`.
inline ModelParams init_params(const ModelSpec& spec, std::uint64_t seed) {
  spec.validate();
  Rng rng = Rng::for_stream(seed, 1);
  ModelParams p;
  p.values.assign(spec.param_count(), 0.0);
  if (spec.kind == ModelKind::ANN) {
    const auto off = detail::ann_offsets(spec);
    const double a1 = 1.0 / std::sqrt(static_cast<double>(spec.input_dim));
    const double a2 = 1.0 / std::sqrt(static_cast<double>(spec.hidden_nodes));
    for (std::size_t i = off.w1; i < off.b1; ++i) p.values[i] = rng.uniform(-a1, a1);
    for (std::size_t i = off.w2; i < off.b2; ++i) p.values[i] = rng.uniform(-a2, a2);
  } else {
    const std::size_t nb = spec.kan.n_basis();
    const std::size_t per = spec.kan.params_per_edge();
    for (std::size_t e = 0; e < p.values.size() / per; ++e) {
      double* edge = p.values.data() + e * per;
      for (std::size_t m = 0; m < nb; ++m) edge[m] = rng.normal(0.0, 0.1);
      edge[nb] = 1.0;
      edge[nb + 1] = 1.0;
    }
  }
  return p;
}

/// Intermediates of one forward pass, consumed by `backward`.
struct ForwardCache {
  ModelKind kind = ModelKind::ANN;
  std::vector<double> input;
  std::vector<double> hidden_pre;   // before activation (ANN) or node sums (KAN)
  std::vector<double> hidden_out;   // after activation and dropout
  std::vector<double> keep_scale;   // dropout multiplier per hidden node
  std::vector<SplineEval> input_basis;   // KAN only
  std::vector<SplineEval> hidden_basis;  // KAN only
};

struct ForwardResult {
  std::vector<double> logits;
  ForwardCache cache;
};

namespace detail {

inline double edge_value(const double* edge, std::size_t nb, const SplineEval& b, int degree,
                         double silu_x, double* spline_out = nullptr) {
  double spline = 0.0;
  for (int r = 0; r <= degree; ++r) spline += edge[b.first + static_cast<std::size_t>(r)] * b.value[r];
  if (spline_out) *spline_out = spline;
  return edge[nb] * silu_x + edge[nb + 1] * spline;
}

}  // namespace detail

/// Evaluates the network on one input vector. In train mode inverted dropout
/// with the spec's rate masks hidden outputs using draws from `rng`; eval mode
/// never touches `rng`.
inline ForwardResult forward(const ModelSpec& spec, const ModelParams& params,
                             std::span<const double> input, Mode mode, Rng* rng = nullptr) {
  if (input.size() != spec.input_dim)
    throw DimensionMismatch("input has " + std::to_string(input.size()) + " values, model expects " +
                            std::to_string(spec.input_dim));
  if (params.values.size() != spec.param_count())
    throw DimensionMismatch("parameter vector does not match model spec");
  const bool dropout = mode == Mode::train && spec.dropout_rate > 0.0;
  if (dropout && rng == nullptr) throw InvalidArgument("train-mode forward needs an rng");

  const auto d = spec.input_dim, h = spec.hidden_nodes, o = spec.output_dim;
  const double* w = params.values.data();
  ForwardResult res;
  auto& c = res.cache;
  c.kind = spec.kind;
  c.input.assign(input.begin(), input.end());
  c.hidden_pre.assign(h, 0.0);
  c.hidden_out.assign(h, 0.0);
  c.keep_scale.assign(h, 1.0);
  if (dropout) {
    const double scale = 1.0 / (1.0 - spec.dropout_rate);
    for (auto& k : c.keep_scale) k = rng->uniform() < spec.dropout_rate ? 0.0 : scale;
  }
  res.logits.assign(o, 0.0);

  if (spec.kind == ModelKind::ANN) {
    const auto off = detail::ann_offsets(spec);
    for (std::size_t j = 0; j < h; ++j) {
      double z = w[off.b1 + j];
      const double* row = w + off.w1 + j * d;
      for (std::size_t i = 0; i < d; ++i) z += row[i] * input[i];
      c.hidden_pre[j] = z;
      c.hidden_out[j] = (z > 0.0 ? z : 0.0) * c.keep_scale[j];
    }
    for (std::size_t k = 0; k < o; ++k) {
      double z = w[off.b2 + k];
      const double* row = w + off.w2 + k * h;
      for (std::size_t j = 0; j < h; ++j) z += row[j] * c.hidden_out[j];
      res.logits[k] = z;
    }
    return res;
  }

  const auto grid = KnotGrid::from(spec.kan);
  const std::size_t nb = spec.kan.n_basis();
  const std::size_t per = spec.kan.params_per_edge();
  const int deg = spec.kan.spline_degree;

  c.input_basis.resize(d);
  std::vector<double> silu_in(d);
  for (std::size_t i = 0; i < d; ++i) {
    c.input_basis[i] = evaluate_spline_basis(grid, input[i]);
    silu_in[i] = detail::silu(input[i]);
  }
  for (std::size_t j = 0; j < h; ++j) {
    double sum = 0.0;
    for (std::size_t i = 0; i < d; ++i)
      sum += detail::edge_value(w + (j * d + i) * per, nb, c.input_basis[i], deg, silu_in[i]);
    c.hidden_pre[j] = sum;
    c.hidden_out[j] = sum * c.keep_scale[j];
  }

  const double* layer2 = w + detail::kan_layer2_offset(spec);
  c.hidden_basis.resize(h);
  std::vector<double> silu_h(h);
  for (std::size_t j = 0; j < h; ++j) {
    c.hidden_basis[j] = evaluate_spline_basis(grid, c.hidden_out[j]);
    silu_h[j] = detail::silu(c.hidden_out[j]);
  }
  for (std::size_t k = 0; k < o; ++k) {
    double sum = 0.0;
    for (std::size_t j = 0; j < h; ++j)
      sum += detail::edge_value(layer2 + (k * h + j) * per, nb, c.hidden_basis[j], deg, silu_h[j]);
    res.logits[k] = sum;
  }
  return res;
}

/// Reverse pass for one sample. Gradients are added into `grads`, which
/// must already have the parameter vector's size.
inline void backward_accumulate(const ModelSpec& spec, const ModelParams& params,
                                const ForwardCache& c, std::span<const double> dlogits,
                                std::span<double> grads) {
  const auto d = spec.input_dim, h = spec.hidden_nodes, o = spec.output_dim;
  if (c.kind != spec.kind || c.input.size() != d || c.hidden_pre.size() != h ||
      c.hidden_out.size() != h || c.keep_scale.size() != h || dlogits.size() != o ||
      params.values.size() != spec.param_count() ||
      (spec.kind == ModelKind::KAN && (c.input_basis.size() != d || c.hidden_basis.size() != h)))
    throw StaleCache("forward cache does not match the model spec");
  if (grads.size() != params.values.size())
    throw ShapeMismatch("gradient buffer does not match parameter count");

  const double* w = params.values.data();
  std::vector<double> dhidden(h, 0.0);

  if (spec.kind == ModelKind::ANN) {
    const auto off = detail::ann_offsets(spec);
    for (std::size_t k = 0; k < o; ++k) {
      const double g = dlogits[k];
      grads[off.b2 + k] += g;
      for (std::size_t j = 0; j < h; ++j) {
        grads[off.w2 + k * h + j] += g * c.hidden_out[j];
        dhidden[j] += g * w[off.w2 + k * h + j];
      }
    }
    for (std::size_t j = 0; j < h; ++j) {
      const double dz = c.hidden_pre[j] > 0.0 ? dhidden[j] * c.keep_scale[j] : 0.0;
      if (dz == 0.0) continue;
      grads[off.b1 + j] += dz;
      for (std::size_t i = 0; i < d; ++i) grads[off.w1 + j * d + i] += dz * c.input[i];
    }
    return;
  }

  const std::size_t nb = spec.kan.n_basis();
  const std::size_t per = spec.kan.params_per_edge();
  const int deg = spec.kan.spline_degree;
  const std::size_t l2 = detail::kan_layer2_offset(spec);

  for (std::size_t k = 0; k < o; ++k) {
    const double g = dlogits[k];
    if (g == 0.0) continue;
    for (std::size_t j = 0; j < h; ++j) {
      const double* edge = w + l2 + (k * h + j) * per;
      double* gedge = grads.data() + l2 + (k * h + j) * per;
      const auto& b = c.hidden_basis[j];
      const double x = c.hidden_out[j];
      double spline = 0.0, dspline = 0.0;
      for (int r = 0; r <= deg; ++r) {
        const std::size_t m = b.first + static_cast<std::size_t>(r);
        spline += edge[m] * b.value[r];
        dspline += edge[m] * b.deriv[r];
        gedge[m] += g * edge[nb + 1] * b.value[r];
      }
      gedge[nb] += g * detail::silu(x);
      gedge[nb + 1] += g * spline;
      dhidden[j] += g * (edge[nb] * detail::silu_grad(x) + edge[nb + 1] * dspline);
    }
  }

  std::vector<double> silu_in(d);
  for (std::size_t i = 0; i < d; ++i) silu_in[i] = detail::silu(c.input[i]);
  for (std::size_t j = 0; j < h; ++j) {
    const double g = dhidden[j] * c.keep_scale[j];
    if (g == 0.0) continue;
    for (std::size_t i = 0; i < d; ++i) {
      const double* edge = w + (j * d + i) * per;
      double* gedge = grads.data() + (j * d + i) * per;
      const auto& b = c.input_basis[i];
      double spline = 0.0;
      for (int r = 0; r <= deg; ++r) {
        const std::size_t m = b.first + static_cast<std::size_t>(r);
        spline += edge[m] * b.value[r];
        gedge[m] += g * edge[nb + 1] * b.value[r];
      }
      gedge[nb] += g * silu_in[i];
      gedge[nb + 1] += g * spline;
    }
  }
}

/// Exact gradient of the loss with respect to every parameter for one sample.
inline std::vector<double> backward(const ModelSpec& spec, const ModelParams& params,
                                    const ForwardCache& cache, std::span<const double> dlogits) {
  std::vector<double> grads(params.values.size(), 0.0);
  backward_accumulate(spec, params, cache, dlogits, grads);
  return grads;
}

}  // namespace eegkan::nn
