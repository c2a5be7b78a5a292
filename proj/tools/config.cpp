#include "config.hpp"

#include <algorithm>
#include <set>

#include "eegkan/parallel.hpp"
#include "eegkan/text.hpp"

namespace eegkan::cli {

using nlohmann::json;

namespace {

void check_keys(const json& j, const std::string& where, const std::set<std::string>& allowed) {
  if (!j.is_object()) throw UsageError("config: '" + where + "' must be an object");
  for (const auto& [key, value] : j.items())
    if (!allowed.count(key))
      throw UsageError("config: unknown key '" + (where.empty() ? key : where + "." + key) + "'");
}

template <typename T>
void read(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw UsageError("config: '" + (where.empty() ? std::string(key) : where + "." + key) +
                     "' has the wrong type");
  }
}

template <typename T>
void read_list(const json& j, const char* key, std::vector<T>& out, const std::string& where) {
  read(j, key, out, where);
}

std::vector<nn::ModelKind> parse_kinds(const std::vector<std::string>& names) {
  std::vector<nn::ModelKind> kinds;
  for (const auto& n : names) {
    try {
      kinds.push_back(nn::parse_model_kind(n));
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
  }
  return kinds;
}

}  // namespace

std::size_t RunConfig::effective_jobs() const { return jobs == 0 ? default_jobs() : jobs; }

nn::ModelSpec RunConfig::model_spec(nn::ModelKind kind, std::size_t input_dim, std::size_t nodes) const {
  nn::ModelSpec s;
  s.kind = kind;
  s.input_dim = input_dim;
  s.hidden_nodes = nodes;
  s.output_dim = dataset::default_class_names().size();
  s.dropout_rate = dropout;
  s.kan = kan;
  return s;
}

dataset::SynthConfig RunConfig::synth_config() const {
  dataset::SynthConfig s;
  s.n_per_class = synth.n_per_class;
  s.profiles = synth.profiles;
  s.noise_level = synth.noise;
  s.sample_rate_hz = synth.sample_rate_hz;
  s.duration_s = synth.duration_s;
  s.seed = seed;
  s.channel_names = synth.channels;
  s.bands = pipeline.bands;
  return s;
}

void apply_json(RunConfig& cfg, const json& doc) {
  check_keys(doc, "",
             {"seed", "out", "jobs", "channels", "filter", "welch", "model", "sweep", "synth", "train"});
  read(doc, "seed", cfg.seed, "");
  if (doc.contains("out")) {
    std::string out;
    read(doc, "out", out, "");
    cfg.out = out;
  }
  read(doc, "jobs", cfg.jobs, "");
  read_list(doc, "channels", cfg.channels, "");

  if (doc.contains("filter")) {
    const auto& f = doc["filter"];
    check_keys(f, "filter", {"order", "low_hz", "high_hz"});
    read(f, "order", cfg.pipeline.filter.order, "filter");
    read(f, "low_hz", cfg.pipeline.filter.low_hz, "filter");
    read(f, "high_hz", cfg.pipeline.filter.high_hz, "filter");
  }
  if (doc.contains("welch")) {
    const auto& w = doc["welch"];
    check_keys(w, "welch", {"segment_len", "overlap", "window"});
    read(w, "segment_len", cfg.pipeline.welch.segment_len, "welch");
    read(w, "overlap", cfg.pipeline.welch.overlap, "welch");
    std::string window = "hann";
    read(w, "window", window, "welch");
    if (window != "hann") throw UsageError("config: welch.window must be \"hann\"");
  }
  if (doc.contains("model")) {
    const auto& m = doc["model"];
    check_keys(m, "model", {"dropout", "kan"});
    read(m, "dropout", cfg.dropout, "model");
    if (m.contains("kan")) {
      const auto& k = m["kan"];
      check_keys(k, "model.kan", {"grid_size", "spline_degree", "grid_lo", "grid_hi"});
      read(k, "grid_size", cfg.kan.grid_size, "model.kan");
      read(k, "spline_degree", cfg.kan.spline_degree, "model.kan");
      read(k, "grid_lo", cfg.kan.grid_lo, "model.kan");
      read(k, "grid_hi", cfg.kan.grid_hi, "model.kan");
    }
  }
  if (doc.contains("sweep")) {
    const auto& s = doc["sweep"];
    check_keys(s, "sweep",
               {"epochs", "lr", "nodes", "kinds", "seeds", "objective", "test_frac", "with_gender",
                "record_timing"});
    read_list(s, "epochs", cfg.grid.epochs, "sweep");
    read_list(s, "lr", cfg.grid.lrs, "sweep");
    read_list(s, "nodes", cfg.grid.nodes, "sweep");
    read_list(s, "seeds", cfg.grid.seeds, "sweep");
    if (s.contains("kinds")) {
      std::vector<std::string> names;
      read_list(s, "kinds", names, "sweep");
      cfg.grid.kinds = parse_kinds(names);
    }
    if (s.contains("objective")) {
      std::string o;
      read(s, "objective", o, "sweep");
      try {
        cfg.objective = experiment::parse_objective(o);
      } catch (const Error& e) {
        throw UsageError(std::string("config: sweep.objective: ") + e.what());
      }
    }
    read(s, "test_frac", cfg.test_frac, "sweep");
    read(s, "with_gender", cfg.with_gender, "sweep");
    read(s, "record_timing", cfg.record_timing, "sweep");
  }
  if (doc.contains("synth")) {
    const auto& s = doc["synth"];
    check_keys(s, "synth",
               {"n_per_class", "noise", "duration_s", "sample_rate_hz", "channels", "profiles"});
    read(s, "n_per_class", cfg.synth.n_per_class, "synth");
    read(s, "noise", cfg.synth.noise, "synth");
    read(s, "duration_s", cfg.synth.duration_s, "synth");
    read(s, "sample_rate_hz", cfg.synth.sample_rate_hz, "synth");
    read_list(s, "channels", cfg.synth.channels, "synth");
    if (s.contains("profiles")) {
      const auto& p = s["profiles"];
      check_keys(p, "synth.profiles", {"AD", "HC"});
      cfg.synth.profiles.clear();
      for (const auto& [label, amps] : p.items()) {
        dataset::ClassProfile cp;
        try {
          cp.label = dataset::parse_label(label);
        } catch (const Error& e) {
          throw UsageError(std::string("config: synth.profiles: ") + e.what());
        }
        read(p, label.c_str(), cp.band_amplitude, "synth.profiles");
        cfg.synth.profiles.push_back(std::move(cp));
      }
    }
  }
  if (doc.contains("train")) {
    const auto& t = doc["train"];
    check_keys(t, "train", {"kind", "epochs", "lr", "nodes"});
    if (t.contains("kind")) {
      std::string k;
      read(t, "kind", k, "train");
      cfg.train.kind = parse_kinds({k}).front();
    }
    read(t, "epochs", cfg.train.epochs, "train");
    read(t, "lr", cfg.train.lr, "train");
    read(t, "nodes", cfg.train.nodes, "train");
  }
}

RunConfig load_config(const std::filesystem::path& path, RunConfig base) {
  std::string text;
  try {
    text = text::read_file(path);
  } catch (const Error& e) {
    throw UsageError(std::string("config: ") + e.what());
  }
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw UsageError("config: " + path.string() + " is not valid JSON: " + e.what());
  }
  apply_json(base, doc);
  return base;
}

void validate(const RunConfig& cfg) {
  auto require = [](bool ok, const std::string& msg) {
    if (!ok) throw UsageError("invalid configuration: " + msg);
  };
  require(!cfg.channels.empty(), "channels must not be empty");
  const auto& f = cfg.pipeline.filter;
  require(f.order >= 1 && f.order <= 20, "filter.order must be in [1, 20]");
  require(f.low_hz > 0 && f.low_hz < f.high_hz, "filter needs 0 < low_hz < high_hz");
  const auto& w = cfg.pipeline.welch;
  require(w.segment_len >= 2, "welch.segment_len must be >= 2");
  require(w.overlap >= 0 && w.overlap < 1, "welch.overlap must be in [0, 1)");
  require(cfg.test_frac > 0 && cfg.test_frac < 1, "test_frac must be in (0, 1)");
  try {
    cfg.model_spec(nn::ModelKind::KAN, 1, 1).validate();
    cfg.grid.validate();
  } catch (const Error& e) {
    throw UsageError(std::string("invalid configuration: ") + e.what());
  }
  require(cfg.train.epochs >= 1, "train.epochs must be >= 1");
  require(cfg.train.lr > 0, "train.lr must be positive");
  require(cfg.train.nodes >= 1, "train.nodes must be >= 1");

  const auto& s = cfg.synth;
  require(s.n_per_class >= 1, "synth.n_per_class must be >= 1");
  require(s.noise >= 0, "synth.noise must be >= 0");
  require(s.duration_s > 0 && s.sample_rate_hz > 0, "synth duration and sample rate must be positive");
  require(!s.channels.empty(), "synth.channels must not be empty");
  require(!s.profiles.empty(), "synth.profiles must not be empty");
  for (const auto& p : s.profiles)
    require(p.band_amplitude.size() == cfg.pipeline.bands.size(),
            std::string("synth profile ") + dataset::to_string(p.label) + " needs one amplitude per band");
}

json to_json(const RunConfig& cfg) {
  std::vector<std::string> kinds;
  for (auto k : cfg.grid.kinds) kinds.emplace_back(nn::to_string(k));
  json profiles = json::object();
  for (const auto& p : cfg.synth.profiles) profiles[dataset::to_string(p.label)] = p.band_amplitude;
  return {
      {"seed", cfg.seed},
      {"out", cfg.out.string()},
      {"jobs", cfg.jobs},
      {"channels", cfg.channels},
      {"filter",
       {{"order", cfg.pipeline.filter.order},
        {"low_hz", cfg.pipeline.filter.low_hz},
        {"high_hz", cfg.pipeline.filter.high_hz}}},
      {"welch",
       {{"segment_len", cfg.pipeline.welch.segment_len},
        {"overlap", cfg.pipeline.welch.overlap},
        {"window", "hann"}}},
      {"model",
       {{"dropout", cfg.dropout},
        {"kan",
         {{"grid_size", cfg.kan.grid_size},
          {"spline_degree", cfg.kan.spline_degree},
          {"grid_lo", cfg.kan.grid_lo},
          {"grid_hi", cfg.kan.grid_hi}}}}},
      {"sweep",
       {{"epochs", cfg.grid.epochs},
        {"lr", cfg.grid.lrs},
        {"nodes", cfg.grid.nodes},
        {"kinds", kinds},
        {"seeds", cfg.grid.seeds},
        {"objective", experiment::to_string(cfg.objective)},
        {"test_frac", cfg.test_frac},
        {"with_gender", cfg.with_gender},
        {"record_timing", cfg.record_timing}}},
      {"synth",
       {{"n_per_class", cfg.synth.n_per_class},
        {"noise", cfg.synth.noise},
        {"duration_s", cfg.synth.duration_s},
        {"sample_rate_hz", cfg.synth.sample_rate_hz},
        {"channels", cfg.synth.channels},
        {"profiles", profiles}}},
      {"train",
       {{"kind", nn::to_string(cfg.train.kind)},
        {"epochs", cfg.train.epochs},
        {"lr", cfg.train.lr},
        {"nodes", cfg.train.nodes}}},
  };
}

}  // namespace eegkan::cli
