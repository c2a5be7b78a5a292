#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <limits>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "eegkan/dataset/dataset.hpp"
#include "eegkan/error.hpp"
#include "eegkan/nn/spec.hpp"
#include "eegkan/nn/train.hpp"
#include "eegkan/parallel.hpp"
#include "eegkan/text.hpp"

namespace eegkan::experiment {

using nn::ModelKind;

struct SweepGrid {
  std::vector<std::size_t> epochs{100, 250, 500, 1000};
  std::vector<double> lrs{0.0001, 0.001, 0.01, 0.1};
  std::vector<std::size_t> nodes{4, 16, 64, 260};
  std::vector<ModelKind> kinds{ModelKind::ANN, ModelKind::KAN};
  std::vector<std::uint64_t> seeds{1, 2, 3};

  void validate() const {
    if (epochs.empty() || lrs.empty() || nodes.empty() || kinds.empty() || seeds.empty())
      throw InvalidArgument("sweep grid lists must be non-empty");
    for (auto e : epochs)
      if (e < 1) throw InvalidArgument("sweep epochs must be positive");
    for (auto l : lrs)
      if (!(l > 0)) throw InvalidArgument("sweep learning rates must be positive");
    for (auto n : nodes)
      if (n < 1) throw InvalidArgument("sweep node counts must be positive");
  }

  std::size_t size() const {
    return kinds.size() * epochs.size() * lrs.size() * nodes.size() * seeds.size();
  }
};

enum class Objective { test_loss, train_loss };

inline const char* to_string(Objective o) {
  return o == Objective::test_loss ? "test_loss" : "train_loss";
}

inline Objective parse_objective(std::string_view s) {
  if (s == "test_loss") return Objective::test_loss;
  if (s == "train_loss") return Objective::train_loss;
  throw InvalidArgument("unknown objective '" + std::string(s) + "'");
}

struct SweepRow {
  ModelKind kind = ModelKind::ANN;
  std::size_t epochs = 0;
  double lr = 0;
  std::size_t nodes = 0;
  std::uint64_t seed = 0;
  double train_loss = std::numeric_limits<double>::quiet_NaN();
  double test_loss = std::numeric_limits<double>::quiet_NaN();
  double test_accuracy = std::numeric_limits<double>::quiet_NaN();
  double wall_time_s = 0;
  std::string status = "ok";  // "ok" or "failed:<reason>"

  bool ok() const { return status == "ok"; }
  double objective(Objective o) const { return o == Objective::test_loss ? test_loss : train_loss; }
  auto key() const { return std::make_tuple(kind, epochs, lr, nodes, seed); }
};

struct SweepResult {
  std::vector<SweepRow> rows;

  bool operator==(const SweepResult& other) const {
    if (rows.size() != other.rows.size()) return false;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& a = rows[i];
      const auto& b = other.rows[i];
      const auto same = [](double x, double y) { return (std::isnan(x) && std::isnan(y)) || x == y; };
      if (a.key() != b.key() || a.status != b.status || !same(a.train_loss, b.train_loss) ||
          !same(a.test_loss, b.test_loss) || !same(a.test_accuracy, b.test_accuracy) ||
          !same(a.wall_time_s, b.wall_time_s))
        return false;
    }
    return true;
  }
};

struct SweepOptions {
  std::size_t jobs = 1;
  /// Wall-clock timings break byte-reproducibility, so they are recorded
  /// only on request; otherwise wall_time_s is 0.
  bool record_timing = false;
};

namespace detail {

template <typename T>
std::vector<T> sorted_unique(std::vector<T> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

inline std::string sanitize_reason(std::string s) {
  for (auto& ch : s)
    if (ch == ',' || ch == '\n' || ch == '\r') ch = ';';
  return s;
}

}  // namespace detail

/// Trains one model per (kind, epochs, lr, nodes, seed) on a bounded worker
/// pool. Rows come back in lexicographic tuple order regardless of
/// scheduling; a run that throws becomes a failed row instead of aborting.
inline SweepResult run_sweep(const SweepGrid& grid, const dataset::Dataset& train,
                             const dataset::Dataset& test, const nn::ModelSpec& model_template,
                             const SweepOptions& opts = {}) {
  grid.validate();
  SweepResult result;
  for (auto kind : detail::sorted_unique(grid.kinds))
    for (auto e : detail::sorted_unique(grid.epochs))
      for (auto lr : detail::sorted_unique(grid.lrs))
        for (auto n : detail::sorted_unique(grid.nodes))
          for (auto s : detail::sorted_unique(grid.seeds)) {
            SweepRow r;
            r.kind = kind;
            r.epochs = e;
            r.lr = lr;
            r.nodes = n;
            r.seed = s;
            result.rows.push_back(r);
          }

  parallel_for(result.rows.size(), opts.jobs, [&](std::size_t i) {
    auto& row = result.rows[i];
    nn::ModelSpec spec = model_template;
    spec.kind = row.kind;
    spec.hidden_nodes = row.nodes;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      const auto [params, report] = nn::train(spec, train, test, {row.epochs, row.lr, row.seed});
      row.train_loss = report.train_loss;
      row.test_loss = report.test_loss;
      row.test_accuracy = report.test_accuracy;
      row.status = "ok";
    } catch (const std::exception& e) {
      row.status = "failed:" + detail::sanitize_reason(e.what());
    }
    if (opts.record_timing)
      row.wall_time_s =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  });
  return result;
}

struct BestConfig {
  ModelKind kind = ModelKind::ANN;
  std::size_t epochs = 0;
  double lr = 0;
  std::size_t nodes = 0;
  double mean_loss = 0;
  std::vector<std::uint64_t> seeds;  // successful seeds, ascending

  bool operator==(const BestConfig&) const = default;
};

/// Grid point with the lowest seed-mean objective over successful rows.
/// Ties prefer fewer epochs, then fewer nodes, then smaller lr.
inline BestConfig best_config(const SweepResult& result, ModelKind kind, Objective objective) {
  // key: (epochs, nodes, lr) -> seed -> loss; ordered maps fix the summation order.
  std::map<std::tuple<std::size_t, std::size_t, double>, std::map<std::uint64_t, double>> groups;
  for (const auto& r : result.rows) {
    if (r.kind != kind || !r.ok()) continue;
    const double v = r.objective(objective);
    if (!std::isfinite(v)) continue;
    groups[{r.epochs, r.nodes, r.lr}][r.seed] = v;
  }
  if (groups.empty())
    throw EmptyResult(std::string("no successful ") + nn::to_string(kind) + " rows");

  BestConfig best;
  bool have = false;
  for (const auto& [key, by_seed] : groups) {
    double sum = 0.0;
    for (const auto& [seed, v] : by_seed) sum += v;
    const double mean = sum / static_cast<double>(by_seed.size());
    // Groups iterate in tie-break order, so only a strictly lower mean wins.
    if (!have || mean < best.mean_loss) {
      have = true;
      best.kind = kind;
      best.epochs = std::get<0>(key);
      best.nodes = std::get<1>(key);
      best.lr = std::get<2>(key);
      best.mean_loss = mean;
      best.seeds.clear();
      for (const auto& [seed, v] : by_seed) best.seeds.push_back(seed);
    }
  }
  return best;
}

// ------------------------------------------------------------------ CSV

inline constexpr std::string_view sweep_csv_header =
    "kind,epochs,lr,nodes,seed,train_loss,test_loss,test_accuracy,wall_time_s,status";

inline std::string format_metric(double v) {
  return std::isnan(v) ? std::string("nan") : text::format_double(v);
}

inline std::string serialize_sweep(const SweepResult& result) {
  std::string out(sweep_csv_header);
  out += '\n';
  for (const auto& r : result.rows) {
    out += std::string(nn::to_string(r.kind)) + "," + std::to_string(r.epochs) + "," +
           text::format_double(r.lr) + "," + std::to_string(r.nodes) + "," + std::to_string(r.seed) +
           "," + format_metric(r.train_loss) + "," + format_metric(r.test_loss) + "," +
           format_metric(r.test_accuracy) + "," + text::format_double(r.wall_time_s) + "," +
           r.status + "\n";
  }
  return out;
}

inline SweepResult parse_sweep(std::string_view content, const std::string& where = "sweep") {
  SweepResult result;
  std::size_t pos = 0, line_no = 0;
  bool header_seen = false;
  const auto metric = [](std::string_view s, double& v) {
    if (text::trim(s) == "nan") {
      v = std::numeric_limits<double>::quiet_NaN();
      return true;
    }
    return text::parse_double(s, v);
  };
  while (pos < content.size()) {
    const auto next = content.find('\n', pos);
    const auto line = text::trim(content.substr(pos, next == std::string_view::npos ? next : next - pos));
    pos = next == std::string_view::npos ? content.size() : next + 1;
    ++line_no;
    if (line.empty()) continue;
    const std::string ctx = where + ":" + std::to_string(line_no);
    if (!header_seen) {
      if (line != sweep_csv_header) throw ParseError(ctx + ": unexpected sweep CSV header");
      header_seen = true;
      continue;
    }
    const auto f = text::split_csv(line);
    if (f.size() != 10) throw ParseError(ctx + ": expected 10 fields");
    SweepRow r;
    long long epochs = 0, nodes = 0, seed = 0;
    try {
      r.kind = nn::parse_model_kind(f[0]);
    } catch (const Error&) {
      throw ParseError(ctx + ": bad kind '" + std::string(f[0]) + "'");
    }
    if (!text::parse_int(f[1], epochs) || epochs < 1 || !text::parse_double(f[2], r.lr) ||
        !text::parse_int(f[3], nodes) || nodes < 1 || !text::parse_int(f[4], seed) || seed < 0 ||
        !metric(f[5], r.train_loss) || !metric(f[6], r.test_loss) ||
        !metric(f[7], r.test_accuracy) || !text::parse_double(f[8], r.wall_time_s))
      throw ParseError(ctx + ": malformed field");
    r.epochs = static_cast<std::size_t>(epochs);
    r.nodes = static_cast<std::size_t>(nodes);
    r.seed = static_cast<std::uint64_t>(seed);
    r.status = std::string(f[9]);
    result.rows.push_back(std::move(r));
  }
  if (!header_seen) throw ParseError(where + ": empty sweep file");
  return result;
}

inline void save_sweep(const SweepResult& result, const std::filesystem::path& path) {
  text::write_file_atomic(path, serialize_sweep(result));
}

inline SweepResult load_sweep(const std::filesystem::path& path) {
  return parse_sweep(text::read_file(path), path.string());
}

}  // namespace eegkan::experiment
