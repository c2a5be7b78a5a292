#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "eegkan/error.hpp"
#include "eegkan/experiment/sweep.hpp"

namespace eegkan::stats {

struct OlsFit {
  std::vector<double> coefficients;  // intercept first when present
  std::vector<std::string> design_columns;
  std::vector<double> fitted;
  std::vector<double> residuals;
  double r_squared = 0;
  std::size_t n = 0;
  bool intercept = true;
  std::vector<std::string> warnings;
};

/// Least squares through a column-pivoted Householder QR. `design` is n rows
/// of k regressors. R^2 = 1 - SS_res / SS_tot with SS_tot taken about the
/// mean when an intercept is fitted; a constant response yields R^2 = 0.
inline OlsFit ols_fit(const std::vector<std::vector<double>>& design,
                      const std::vector<double>& response, bool with_intercept,
                      std::vector<std::string> column_names = {}) {
  const std::size_t n = response.size();
  if (design.size() != n) throw ShapeMismatch("design rows and response length differ");
  const std::size_t k = n == 0 ? 0 : design.front().size();
  for (const auto& row : design)
    if (row.size() != k) throw ShapeMismatch("design rows have unequal length");
  const std::size_t p = k + (with_intercept ? 1 : 0);
  if (p == 0) throw InvalidArgument("design has no columns");
  if (n <= p)
    throw TooFewRows(std::to_string(n) + " observations for " + std::to_string(p) + " coefficients");

  if (column_names.empty())
    for (std::size_t j = 0; j < k; ++j) column_names.push_back("x" + std::to_string(j + 1));
  if (column_names.size() != k) throw ShapeMismatch("column name count differs from design width");

  Eigen::MatrixXd x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
  Eigen::VectorXd y(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    Eigen::Index c = 0;
    if (with_intercept) x(r, c++) = 1.0;
    for (std::size_t j = 0; j < k; ++j) x(r, c++) = design[i][j];
    y(r) = response[i];
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  qr.setThreshold(1e-10);
  if (qr.rank() < static_cast<Eigen::Index>(p))
    throw RankDeficient("design of " + std::to_string(p) + " columns has rank " +
                        std::to_string(qr.rank()));
  const Eigen::VectorXd beta = qr.solve(y);
  const Eigen::VectorXd fitted = x * beta;
  const Eigen::VectorXd resid = y - fitted;

  OlsFit fit;
  fit.n = n;
  fit.intercept = with_intercept;
  if (with_intercept) fit.design_columns.push_back("intercept");
  fit.design_columns.insert(fit.design_columns.end(), column_names.begin(), column_names.end());
  fit.coefficients.assign(beta.data(), beta.data() + beta.size());
  fit.fitted.assign(fitted.data(), fitted.data() + fitted.size());
  fit.residuals.assign(resid.data(), resid.data() + resid.size());

  const double center = with_intercept ? y.mean() : 0.0;
  const double ss_tot = (y.array() - center).square().sum();
  const double ss_res = resid.squaredNorm();
  if (ss_tot == 0.0) {
    fit.r_squared = 0.0;
    fit.warnings.push_back("response has zero total variation; R^2 defined as 0");
  } else {
    fit.r_squared = 1.0 - ss_res / ss_tot;
    if (with_intercept) fit.r_squared = std::clamp(fit.r_squared, 0.0, 1.0);
  }
  return fit;
}

enum class RegressorEncoding { standardized, raw };

inline const char* to_string(RegressorEncoding e) {
  return e == RegressorEncoding::standardized ? "standardized" : "raw";
}

struct LossRegression {
  nn::ModelKind kind = nn::ModelKind::ANN;
  experiment::Objective objective = experiment::Objective::test_loss;
  RegressorEncoding encoding = RegressorEncoding::standardized;
  std::vector<std::string> dropped_columns;  // constant over the rows used
  OlsFit fit;
};

/// Regresses the objective of every successful row of `kind` on the sweep
/// hyperparameters with an intercept. The standardized encoding z-scores
/// epochs, log10(lr) and nodes; the raw encoding uses them untransformed.
/// Columns that are constant across the rows are dropped.
inline LossRegression loss_regression(
    const experiment::SweepResult& result, nn::ModelKind kind,
    experiment::Objective objective = experiment::Objective::test_loss,
    RegressorEncoding encoding = RegressorEncoding::standardized) {
  std::vector<std::array<double, 3>> x;
  std::vector<double> y;
  for (const auto& r : result.rows) {
    if (r.kind != kind || !r.ok() || !std::isfinite(r.objective(objective))) continue;
    const double lr = encoding == RegressorEncoding::standardized ? std::log10(r.lr) : r.lr;
    x.push_back({static_cast<double>(r.epochs), lr, static_cast<double>(r.nodes)});
    y.push_back(r.objective(objective));
  }
  if (y.size() < 5)
    throw TooFewRows(std::string(nn::to_string(kind)) + " has " + std::to_string(y.size()) +
                     " successful rows; regression needs at least 5");

  const std::array<std::string, 3> names =
      encoding == RegressorEncoding::standardized
          ? std::array<std::string, 3>{"epochs_z", "log10_lr_z", "nodes_z"}
          : std::array<std::string, 3>{"epochs", "lr", "nodes"};

  LossRegression out;
  out.kind = kind;
  out.objective = objective;
  out.encoding = encoding;

  std::vector<std::size_t> keep;
  std::array<double, 3> mean{}, sd{};
  for (std::size_t j = 0; j < 3; ++j) {
    for (const auto& row : x) mean[j] += row[j];
    mean[j] /= static_cast<double>(x.size());
    for (const auto& row : x) sd[j] += (row[j] - mean[j]) * (row[j] - mean[j]);
    sd[j] = std::sqrt(sd[j] / static_cast<double>(x.size()));
    if (sd[j] > 0)
      keep.push_back(j);
    else
      out.dropped_columns.push_back(names[j]);
  }

  std::vector<std::vector<double>> design(x.size());
  std::vector<std::string> cols;
  for (auto j : keep) cols.push_back(names[j]);
  for (std::size_t i = 0; i < x.size(); ++i)
    for (auto j : keep)
      design[i].push_back(encoding == RegressorEncoding::standardized ? (x[i][j] - mean[j]) / sd[j]
                                                                      : x[i][j]);

  if (keep.empty()) {
    // Intercept-only model: every regressor was constant.
    out.fit = ols_fit(std::vector<std::vector<double>>(y.size(), std::vector<double>{}), y, true, {});
  } else {
    out.fit = ols_fit(design, y, true, cols);
  }
  return out;
}

/// Report JSON: coefficients keyed by column, R^2, n and residual summary.
inline nlohmann::json to_json(const LossRegression& reg) {
  nlohmann::json j;
  j["kind"] = nn::to_string(reg.kind);
  j["objective"] = experiment::to_string(reg.objective);
  j["encoding"] = to_string(reg.encoding);
  j["r_squared"] = reg.fit.r_squared;
  j["n"] = reg.fit.n;
  j["columns"] = reg.fit.design_columns;
  nlohmann::json coef = nlohmann::json::object();
  for (std::size_t i = 0; i < reg.fit.coefficients.size(); ++i)
    coef[reg.fit.design_columns[i]] = reg.fit.coefficients[i];
  j["coefficients"] = coef;
  j["dropped_columns"] = reg.dropped_columns;
  const auto& res = reg.fit.residuals;
  double mn = res.empty() ? 0 : res.front(), mx = mn, sum = 0, sq = 0;
  for (double v : res) {
    mn = std::min(mn, v);
    mx = std::max(mx, v);
    sum += v;
    sq += v * v;
  }
  const double n = static_cast<double>(std::max<std::size_t>(res.size(), 1));
  j["residuals"] = {{"min", mn}, {"max", mx}, {"mean", sum / n}, {"rms", std::sqrt(sq / n)}};
  j["warnings"] = reg.fit.warnings;
  return j;
}

}  // namespace eegkan::stats
