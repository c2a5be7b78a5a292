#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "eegkan/rng.hpp"
#include "eegkan/stats/ols.hpp"

using namespace eegkan;
using namespace eegkan::stats;

namespace {

// Closed-form simple regression, independent of the QR path.
struct Line {
  double intercept, slope, r2;
};

Line normal_equations(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double sx = std::accumulate(x.begin(), x.end(), 0.0);
  const double sy = std::accumulate(y.begin(), y.end(), 0.0);
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double intercept = (sy - slope * sx) / n;
  double ss_res = 0, ss_tot = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - intercept - slope * x[i];
    ss_res += e * e;
    ss_tot += (y[i] - sy / n) * (y[i] - sy / n);
  }
  return {intercept, slope, 1 - ss_res / ss_tot};
}

std::vector<std::vector<double>> column(const std::vector<double>& x) {
  std::vector<std::vector<double>> d;
  for (double v : x) d.push_back({v});
  return d;
}

experiment::SweepRow row(std::size_t epochs, double lr, std::size_t nodes, double loss) {
  experiment::SweepRow r;
  r.kind = nn::ModelKind::ANN;
  r.epochs = epochs;
  r.lr = lr;
  r.nodes = nodes;
  r.seed = 1;
  r.train_loss = r.test_loss = loss;
  return r;
}

}  // namespace

TEST(Ols, ExactLine) {
  const auto fit = ols_fit(column({1, 2, 3}), {3, 5, 7}, true);
  EXPECT_NEAR(fit.coefficients[0], 1.0, 1e-12);
  EXPECT_NEAR(fit.coefficients[1], 2.0, 1e-12);
  EXPECT_NEAR(fit.r_squared, 1.0, 1e-12);
}

TEST(Ols, HandSolvedFourPoints) {
  const std::vector<double> x{1, 2, 3, 4}, y{2, 3, 5, 6};
  const auto oracle = normal_equations(x, y);
  EXPECT_NEAR(oracle.slope, 1.4, 1e-12);
  EXPECT_NEAR(oracle.intercept, 0.5, 1e-12);
  EXPECT_NEAR(oracle.r2, 0.98, 1e-12);
  const auto fit = ols_fit(column(x), y, true);
  EXPECT_NEAR(fit.coefficients[0], 0.5, 1e-10);
  EXPECT_NEAR(fit.coefficients[1], 1.4, 1e-10);
  EXPECT_NEAR(fit.r_squared, 0.98, 1e-10);
  EXPECT_NEAR(std::accumulate(fit.residuals.begin(), fit.residuals.end(), 0.0), 0.0, 1e-9);
}

TEST(Ols, ConstantResponseHasZeroRSquared) {
  const auto fit = ols_fit(column({1, 2, 3, 4}), {2.5, 2.5, 2.5, 2.5}, true);
  EXPECT_NEAR(fit.coefficients[0], 2.5, 1e-12);
  EXPECT_NEAR(fit.coefficients[1], 0.0, 1e-12);
  EXPECT_EQ(fit.r_squared, 0.0);
  EXPECT_FALSE(fit.warnings.empty());
}

TEST(Ols, RandomDesignProperties) {
  Rng rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 10 + rng.below(40), k = 1 + rng.below(4);
    std::vector<std::vector<double>> d(n, std::vector<double>(k));
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (auto& v : d[i]) v = rng.normal(0, 3);
      y[i] = rng.normal(1, 2) + 0.5 * d[i][0];
    }
    const auto fit = ols_fit(d, y, true);
    EXPECT_GE(fit.r_squared, 0.0);
    EXPECT_LE(fit.r_squared, 1.0);
    EXPECT_EQ(fit.residuals.size(), n);
    // Residuals are orthogonal to every column, including the intercept.
    for (std::size_t j = 0; j <= k; ++j) {
      double dot = 0;
      for (std::size_t i = 0; i < n; ++i) dot += (j == 0 ? 1.0 : d[i][j - 1]) * fit.residuals[i];
      EXPECT_LT(std::abs(dot), 1e-8);
    }
    // Scale equivariance.
    std::vector<double> ys(y);
    for (auto& v : ys) v *= 3.5;
    const auto scaled = ols_fit(d, ys, true);
    for (std::size_t j = 0; j < fit.coefficients.size(); ++j)
      EXPECT_NEAR(scaled.coefficients[j], 3.5 * fit.coefficients[j], 1e-9 * (1 + std::abs(fit.coefficients[j])));
    EXPECT_NEAR(scaled.r_squared, fit.r_squared, 1e-10);
  }
}

TEST(Ols, DuplicateColumnIsRankDeficient) {
  std::vector<std::vector<double>> d{{1, 1}, {2, 2}, {3, 3}, {4, 4}, {5, 5}};
  EXPECT_THROW(ols_fit(d, {1, 2, 3, 4, 6}, true), RankDeficient);
  EXPECT_THROW(ols_fit(column({1, 2}), {1, 2}, true), TooFewRows);
}

TEST(LossRegression, LinearInEpochsAndConstant) {
  experiment::SweepResult lin, flat;
  for (std::size_t e : {100u, 250u, 500u, 1000u})
    for (double lr : {0.001, 0.01})
      for (std::size_t n : {4u, 16u}) {
        lin.rows.push_back(row(e, lr, n, 2.0 - 0.001 * static_cast<double>(e)));
        flat.rows.push_back(row(e, lr, n, 0.7));
      }
  const auto a = loss_regression(lin, nn::ModelKind::ANN);
  EXPECT_NEAR(a.fit.r_squared, 1.0, 1e-9);
  EXPECT_EQ(a.fit.design_columns,
            (std::vector<std::string>{"intercept", "epochs_z", "log10_lr_z", "nodes_z"}));
  const auto b = loss_regression(flat, nn::ModelKind::ANN);
  EXPECT_EQ(b.fit.r_squared, 0.0);

  const auto raw = loss_regression(lin, nn::ModelKind::ANN, experiment::Objective::test_loss,
                                   RegressorEncoding::raw);
  EXPECT_NEAR(raw.fit.coefficients[1], -0.001, 1e-12);

  const auto j = to_json(a);
  EXPECT_EQ(j["kind"], "ANN");
  EXPECT_TRUE(j["coefficients"].contains("epochs_z"));
}

TEST(LossRegression, ConstantRegressorsAreDroppedAndTooFewRowsRejected) {
  experiment::SweepResult r;
  for (std::size_t e : {10u, 20u, 30u, 40u, 50u, 60u}) r.rows.push_back(row(e, 0.01, 4, 0.1 * static_cast<double>(e)));
  const auto reg = loss_regression(r, nn::ModelKind::ANN);
  EXPECT_EQ(reg.dropped_columns, (std::vector<std::string>{"log10_lr_z", "nodes_z"}));
  EXPECT_NEAR(reg.fit.r_squared, 1.0, 1e-9);
  r.rows.resize(4);
  EXPECT_THROW(loss_regression(r, nn::ModelKind::ANN), TooFewRows);
}
