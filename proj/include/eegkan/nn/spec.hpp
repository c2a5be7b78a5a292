#pragma once

#include <cstddef>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "eegkan/error.hpp"

namespace eegkan::nn {

enum class ModelKind { ANN, KAN };

inline const char* to_string(ModelKind k) { return k == ModelKind::ANN ? "ANN" : "KAN"; }

inline ModelKind parse_model_kind(std::string_view s) {
  if (s == "ANN") return ModelKind::ANN;
  if (s == "KAN") return ModelKind::KAN;
  throw InvalidArgument("unknown model kind '" + std::string(s) + "' (expected ANN or KAN)");
}

/// Spline parameterization of every KAN edge.
struct KanConfig {
  int grid_size = 5;
  int spline_degree = 3;
  double grid_lo = -2.0;
  double grid_hi = 2.0;

  static constexpr int max_degree = 7;

  std::size_t n_basis() const { return static_cast<std::size_t>(grid_size + spline_degree); }
  /// Spline coefficients plus base weight plus spline scale.
  std::size_t params_per_edge() const { return n_basis() + 2; }

  bool operator==(const KanConfig&) const = default;
};

/// Architecture of a single-hidden-layer classifier of either family.
struct ModelSpec {
  ModelKind kind = ModelKind::ANN;
  std::size_t input_dim = 20;
  std::size_t hidden_nodes = 16;
  std::size_t output_dim = 3;
  double dropout_rate = 0.5;
  KanConfig kan{};

  void validate() const {
    if (input_dim < 1) throw InvalidArgument("input_dim must be >= 1");
    if (hidden_nodes < 1) throw InvalidArgument("hidden_nodes must be >= 1");
    if (output_dim < 1) throw InvalidArgument("output_dim must be >= 1");
    if (!(dropout_rate >= 0.0 && dropout_rate < 1.0))
      throw InvalidArgument("dropout_rate must lie in [0, 1)");
    if (kind == ModelKind::KAN) {
      if (kan.grid_size < 1) throw InvalidArgument("grid_size must be >= 1");
      if (kan.spline_degree < 1 || kan.spline_degree > KanConfig::max_degree)
        throw InvalidArgument("spline_degree must lie in [1, 7]");
      if (!(kan.grid_lo < kan.grid_hi)) throw InvalidArgument("grid range must be increasing");
    }
  }

  /// ANN: h(d+1) + o(h+1).  KAN: (dh + ho)(grid_size + degree + 2).
  std::size_t param_count() const {
    const auto d = input_dim, h = hidden_nodes, o = output_dim;
    if (kind == ModelKind::ANN) return h * (d + 1) + o * (h + 1);
    return (d * h + h * o) * kan.params_per_edge();
  }

  bool operator==(const ModelSpec&) const = default;
};

inline nlohmann::json to_json(const ModelSpec& s) {
  nlohmann::json j;
  j["kind"] = to_string(s.kind);
  j["input_dim"] = s.input_dim;
  j["hidden_nodes"] = s.hidden_nodes;
  j["output_dim"] = s.output_dim;
  j["dropout_rate"] = s.dropout_rate;
  j["kan"] = {{"grid_size", s.kan.grid_size},
              {"spline_degree", s.kan.spline_degree},
              {"grid_range", {s.kan.grid_lo, s.kan.grid_hi}}};
  return j;
}

inline ModelSpec model_spec_from_json(const nlohmann::json& j) {
  ModelSpec s;
  try {
    s.kind = parse_model_kind(j.at("kind").get<std::string>());
    s.input_dim = j.at("input_dim").get<std::size_t>();
    s.hidden_nodes = j.at("hidden_nodes").get<std::size_t>();
    s.output_dim = j.at("output_dim").get<std::size_t>();
    s.dropout_rate = j.at("dropout_rate").get<double>();
    const auto& k = j.at("kan");
    s.kan.grid_size = k.at("grid_size").get<int>();
    s.kan.spline_degree = k.at("spline_degree").get<int>();
    const auto range = k.at("grid_range").get<std::vector<double>>();
    if (range.size() != 2) throw InvalidArgument("grid_range must have two entries");
    s.kan.grid_lo = range[0];
    s.kan.grid_hi = range[1];
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("bad model spec: ") + e.what());
  }
  s.validate();
  return s;
}

}  // namespace eegkan::nn
