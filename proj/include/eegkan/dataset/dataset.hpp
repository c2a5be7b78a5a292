#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "eegkan/dataset/features.hpp"
#include "eegkan/dataset/recording.hpp"
#include "eegkan/error.hpp"
#include "eegkan/parallel.hpp"
#include "eegkan/rng.hpp"
#include "eegkan/text.hpp"

namespace eegkan::dataset {

/// Class index 2 is reserved: the output layer keeps three units although
/// only AD (0) and HC (1) occur in the data.
inline std::vector<std::string> default_class_names() { return {"AD", "HC", "reserved"}; }

/// Per-column z-score parameters. An empty normalization is the identity.
struct Normalization {
  std::vector<double> mean;
  std::vector<double> stddev;

  bool empty() const { return mean.empty(); }

  static Normalization fit(const std::vector<FeatureRow>& rows) {
    Normalization n;
    if (rows.empty()) return n;
    const std::size_t dim = rows.front().features.size();
    n.mean.assign(dim, 0.0);
    n.stddev.assign(dim, 0.0);
    for (const auto& r : rows)
      for (std::size_t j = 0; j < dim; ++j) n.mean[j] += r.features[j];
    for (auto& m : n.mean) m /= static_cast<double>(rows.size());
    for (const auto& r : rows)
      for (std::size_t j = 0; j < dim; ++j) {
        const double d = r.features[j] - n.mean[j];
        n.stddev[j] += d * d;
      }
    for (auto& s : n.stddev) {
      s = std::sqrt(s / static_cast<double>(rows.size()));
      // A constant column carries no information; leave it centered only.
      if (!(s > 0)) s = 1.0;
    }
    return n;
  }

  std::vector<double> apply(const std::vector<double>& x) const {
    if (empty()) return x;
    std::vector<double> out(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) out[j] = (x[j] - mean[j]) / stddev[j];
    return out;
  }

  std::vector<double> invert(const std::vector<double>& z) const {
    if (empty()) return z;
    std::vector<double> out(z.size());
    for (std::size_t j = 0; j < z.size(); ++j) out[j] = z[j] * stddev[j] + mean[j];
    return out;
  }

  bool operator==(const Normalization&) const = default;
};

struct Dataset {
  std::vector<FeatureRow> rows;
  Normalization normalization;  // already applied to rows.features
  std::vector<std::string> class_names = default_class_names();

  std::size_t feature_dim() const { return rows.empty() ? 0 : rows.front().features.size(); }

  std::size_t count_label(int label) const {
    return static_cast<std::size_t>(std::count_if(
        rows.begin(), rows.end(), [label](const FeatureRow& r) { return r.label_index == label; }));
  }

  bool operator==(const Dataset&) const = default;
};

// ---------------------------------------------------------------- manifest

struct ManifestEntry {
  std::filesystem::path path;  // resolved against the manifest's directory
  std::string label;           // AD, HC or FTD
  bool excluded = false;
};

inline bool parse_bool(std::string_view s, bool& out) {
  if (s == "true" || s == "1" || s == "yes" || s == "True" || s == "TRUE") return out = true, true;
  if (s.empty() || s == "false" || s == "0" || s == "no" || s == "False" || s == "FALSE")
    return out = false, true;
  return false;
}

/// Reads a manifest CSV. Columns are located by header name, so extra
/// metadata columns (MMSE, participant-id, File Name, ...) are ignored.
inline std::vector<ManifestEntry> read_manifest(const std::filesystem::path& manifest_path) {
  const auto content = text::read_file(manifest_path);
  const auto base = manifest_path.parent_path();
  std::vector<ManifestEntry> entries;

  std::optional<std::size_t> col_path, col_label, col_excluded;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool header_seen = false;
  while (pos < content.size()) {
    const auto next = content.find('\n', pos);
    const auto line = text::trim(std::string_view(content).substr(
        pos, next == std::string::npos ? std::string::npos : next - pos));
    pos = next == std::string::npos ? content.size() : next + 1;
    ++line_no;
    if (line.empty()) continue;
    const auto fields = text::split_csv(line);
    const std::string where = manifest_path.string() + ":" + std::to_string(line_no);
    if (!header_seen) {
      for (std::size_t i = 0; i < fields.size(); ++i) {
        if (fields[i] == "path") col_path = i;
        if (fields[i] == "label") col_label = i;
        if (fields[i] == "excluded") col_excluded = i;
      }
      if (!col_path || !col_label)
        throw ParseError(where + ": manifest header must contain 'path' and 'label'");
      header_seen = true;
      continue;
    }
    const std::size_t needed = std::max({*col_path, *col_label, col_excluded.value_or(0)}) + 1;
    if (fields.size() < needed) throw ParseError(where + ": too few columns");
    ManifestEntry e;
    e.path = base / std::string(fields[*col_path]);
    e.label = std::string(fields[*col_label]);
    if (col_excluded && !parse_bool(fields[*col_excluded], e.excluded))
      throw ParseError(where + ": bad excluded value '" + std::string(fields[*col_excluded]) + "'");
    if (e.label == "FTD" && !e.excluded)
      throw ParseError(where + ": FTD subject " + e.path.string() +
                       " must be removed or marked excluded=true");
    if (!e.excluded && e.label != "AD" && e.label != "HC")
      throw ParseError(where + ": unknown label '" + e.label + "'");
    entries.push_back(std::move(e));
  }
  return entries;
}

/// Loads every non-excluded recording in the manifest, restricts it to
/// `channel_names` and extracts its band-power features. Recordings are
/// processed concurrently; rows keep manifest order.
inline Dataset build_dataset(const std::filesystem::path& manifest_path,
                             const std::vector<std::string>& channel_names,
                             const PipelineConfig& cfg = {}, std::size_t jobs = 1) {
  std::vector<ManifestEntry> active;
  for (auto& e : read_manifest(manifest_path))
    if (!e.excluded) active.push_back(std::move(e));
  if (active.empty()) throw EmptyDataset(manifest_path.string() + " lists no usable recordings");

  std::vector<FeatureRow> rows(active.size());
  parallel_for(active.size(), jobs, [&](std::size_t i) {
    const auto& e = active[i];
    try {
      const auto rec = load_recording(e.path);
      if (to_string(rec.label) != e.label)
        throw ParseError("label " + std::string(to_string(rec.label)) +
                         " in file disagrees with manifest label " + e.label);
      rows[i] = extract_features(select_channels(rec, channel_names), cfg);
    } catch (const Error& err) {
      throw ParseError(e.path.string() + ": " + err.what());
    }
  });

  Dataset ds;
  ds.rows = std::move(rows);
  return ds;
}

// ------------------------------------------------------------ feature CSV

inline std::string feature_column_name(std::size_t j) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "f%02zu", j);
  return buf;
}

/// Header `subject_id,label,gender,f00..fNN`; label and gender are the
/// numeric indices.
inline std::string serialize_features(const Dataset& ds) {
  std::string out = "subject_id,label,gender";
  for (std::size_t j = 0; j < ds.feature_dim(); ++j) out += "," + feature_column_name(j);
  out += '\n';
  for (const auto& r : ds.rows) {
    out += r.subject_id + "," + std::to_string(r.label_index) + "," + std::to_string(r.gender_index);
    for (double v : r.features) out += "," + text::format_double(v);
    out += '\n';
  }
  return out;
}

inline Dataset parse_features(std::string_view content, const std::string& where = "features") {
  Dataset ds;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  std::size_t dim = 0;
  bool header_seen = false;
  while (pos < content.size()) {
    const auto next = content.find('\n', pos);
    const auto line = text::trim(content.substr(pos, next == std::string_view::npos ? next : next - pos));
    pos = next == std::string_view::npos ? content.size() : next + 1;
    ++line_no;
    if (line.empty()) continue;
    const auto fields = text::split_csv(line);
    const std::string ctx = where + ":" + std::to_string(line_no);
    if (!header_seen) {
      if (fields.size() < 4 || fields[0] != "subject_id" || fields[1] != "label" ||
          fields[2] != "gender")
        throw ParseError(ctx + ": expected header subject_id,label,gender,f00,...");
      for (std::size_t j = 3; j < fields.size(); ++j)
        if (fields[j] != feature_column_name(j - 3))
          throw ParseError(ctx + ": unexpected column '" + std::string(fields[j]) + "'");
      dim = fields.size() - 3;
      header_seen = true;
      continue;
    }
    if (fields.size() != dim + 3)
      throw ParseError(ctx + ": expected " + std::to_string(dim + 3) + " fields");
    FeatureRow r;
    r.subject_id = std::string(fields[0]);
    long long label = 0, gender = 0;
    if (!text::parse_int(fields[1], label) || label < 0 || label > 2)
      throw ParseError(ctx + ": bad label index");
    if (!text::parse_int(fields[2], gender) || gender < 0 || gender > 2)
      throw ParseError(ctx + ": bad gender index");
    r.label_index = static_cast<int>(label);
    r.gender_index = static_cast<int>(gender);
    for (std::size_t j = 0; j < dim; ++j) {
      double v = 0;
      if (!text::parse_double(fields[3 + j], v) || !std::isfinite(v))
        throw ParseError(ctx + ": bad feature value '" + std::string(fields[3 + j]) + "'");
      r.features.push_back(v);
    }
    ds.rows.push_back(std::move(r));
  }
  if (ds.rows.empty()) throw EmptyDataset(where + " contains no rows");
  return ds;
}

inline Dataset load_features(const std::filesystem::path& path) {
  return parse_features(text::read_file(path), path.string());
}

inline void save_features(const Dataset& ds, const std::filesystem::path& path) {
  text::write_file_atomic(path, serialize_features(ds));
}

// ------------------------------------------------------ model preparation

/// Appends the gender index as an extra (later standardized) input column.
inline Dataset with_gender_feature(Dataset ds) {
  for (auto& r : ds.rows) r.features.push_back(static_cast<double>(r.gender_index));
  return ds;
}

/// Stratified shuffle split. Each class sends floor(n_c * test_frac) rows to
/// the test side, clamped to [1, n_c - 1] so both sides see every class.
/// Standardization statistics come from the training rows only and are
/// applied to both halves. Row order within each half follows the input.
inline std::pair<Dataset, Dataset> split(const Dataset& ds, double test_frac, std::uint64_t seed) {
  if (!(test_frac > 0.0 && test_frac < 1.0)) throw InvalidArgument("test_frac must lie in (0, 1)");

  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < ds.rows.size(); ++i) by_class[ds.rows[i].label_index].push_back(i);
  if (by_class.empty()) throw TooFewRows("dataset is empty");
  for (const auto& [label, idx] : by_class)
    if (idx.size() < 2)
      throw TooFewRows("class " + std::to_string(label) + " has " + std::to_string(idx.size()) +
                       " rows; at least 2 are needed to split");

  Rng rng = Rng::for_stream(seed, 0x5011);
  std::vector<bool> is_test(ds.rows.size(), false);
  for (auto& [label, idx] : by_class) {
    rng.shuffle(idx.begin(), idx.end());
    auto n_test = static_cast<std::size_t>(std::floor(static_cast<double>(idx.size()) * test_frac));
    n_test = std::clamp<std::size_t>(n_test, 1, idx.size() - 1);
    for (std::size_t k = 0; k < n_test; ++k) is_test[idx[k]] = true;
  }

  Dataset train, test;
  train.class_names = test.class_names = ds.class_names;
  for (std::size_t i = 0; i < ds.rows.size(); ++i)
    (is_test[i] ? test : train).rows.push_back(ds.rows[i]);

  const auto norm = Normalization::fit(train.rows);
  for (auto* part : {&train, &test}) {
    for (auto& r : part->rows) r.features = norm.apply(r.features);
    part->normalization = norm;
  }
  return {std::move(train), std::move(test)};
}

}  // namespace eegkan::dataset
