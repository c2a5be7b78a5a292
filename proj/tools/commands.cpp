#include "commands.hpp"

#include <cstdio>
#include <map>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "eegkan/eegkan.hpp"

namespace eegkan::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void prepare_out(const RunConfig& cfg) {
  std::error_code ec;
  fs::create_directories(cfg.out, ec);
  if (ec) throw IoError("cannot create output directory " + cfg.out.string() + ": " + ec.message());
}

void write_json(const fs::path& path, const json& j) { text::write_file_atomic(path, j.dump(2) + "\n"); }

struct Prepared {
  dataset::Dataset train, test;
  std::size_t input_dim = 0;
};

Prepared prepare_data(const RunConfig& cfg, const fs::path& features) {
  auto ds = dataset::load_features(features);
  if (cfg.with_gender) ds = dataset::with_gender_feature(std::move(ds));
  Prepared p;
  std::tie(p.train, p.test) = dataset::split(ds, cfg.test_frac, cfg.seed);
  p.input_dim = ds.rows.front().features.size();
  return p;
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

json best_json(const experiment::BestConfig& b, const experiment::SweepResult& r,
               experiment::Objective objective) {
  double acc = 0;
  int n = 0;
  for (const auto& row : r.rows)
    if (row.ok() && row.kind == b.kind && row.epochs == b.epochs && row.lr == b.lr && row.nodes == b.nodes) {
      acc += row.test_accuracy;
      ++n;
    }
  return {{"kind", nn::to_string(b.kind)},
          {"epochs", b.epochs},
          {"lr", b.lr},
          {"nodes", b.nodes},
          {"objective", experiment::to_string(objective)},
          {"mean_loss", b.mean_loss},
          {"mean_test_accuracy", n ? acc / n : 0.0},
          {"seeds", b.seeds}};
}

std::vector<nn::ModelKind> kinds_in(const experiment::SweepResult& r) {
  std::vector<nn::ModelKind> kinds;
  for (const auto& row : r.rows)
    if (std::find(kinds.begin(), kinds.end(), row.kind) == kinds.end()) kinds.push_back(row.kind);
  std::sort(kinds.begin(), kinds.end());
  return kinds;
}

}  // namespace

void cmd_synth(const RunConfig& cfg, std::ostream& log) {
  validate(cfg);
  const auto recs = dataset::synthesize_dataset(cfg.synth_config());
  prepare_out(cfg);
  const fs::path rec_dir = cfg.out / "recordings";
  fs::create_directories(rec_dir);
  std::string manifest = "path,label,gender,excluded\n";
  for (const auto& r : recs) {
    const std::string rel = "recordings/" + r.subject_id + ".csv";
    dataset::save_recording(r, cfg.out / rel);
    manifest += rel + "," + dataset::to_string(r.label) + "," + dataset::to_string(r.gender) + ",false\n";
  }
  text::write_file_atomic(cfg.out / "manifest.csv", manifest);
  log << "wrote " << recs.size() << " recordings and " << (cfg.out / "manifest.csv").string() << "\n";
}

void cmd_features(const RunConfig& cfg, const fs::path& manifest, std::ostream& log) {
  validate(cfg);
  const auto ds = dataset::build_dataset(manifest, cfg.channels, cfg.pipeline, cfg.effective_jobs());
  for (std::size_t i = 0; i < ds.rows.size(); ++i)
    log << "[" << i + 1 << "/" << ds.rows.size() << "] " << ds.rows[i].subject_id << "\n";
  prepare_out(cfg);
  dataset::save_features(ds, cfg.out / "features.csv");
  log << "wrote " << (cfg.out / "features.csv").string() << " (" << ds.rows.size() << " rows, "
      << ds.rows.front().features.size() << " features)\n";
}

void cmd_train(const RunConfig& cfg, const fs::path& features, std::ostream& log) {
  validate(cfg);
  const auto data = prepare_data(cfg, features);
  const auto spec = cfg.model_spec(cfg.train.kind, data.input_dim, cfg.train.nodes);
  const auto [params, report] =
      nn::train(spec, data.train, data.test, {cfg.train.epochs, cfg.train.lr, cfg.seed});
  const auto train_eval = nn::evaluate(spec, params, data.train);

  prepare_out(cfg);
  const std::string kind = nn::to_string(spec.kind);
  nn::save_checkpoint({spec, params, cfg.seed, cfg.train.epochs}, cfg.out / ("model_" + kind + ".ckpt"));
  write_json(cfg.out / ("train_" + kind + ".json"),
             {{"spec", nn::to_json(spec)},
              {"epochs", cfg.train.epochs},
              {"lr", cfg.train.lr},
              {"seed", cfg.seed},
              {"train_rows", data.train.rows.size()},
              {"test_rows", data.test.rows.size()},
              {"final_train_loss", report.train_loss},
              {"train_eval_loss", train_eval.loss},
              {"train_accuracy", train_eval.accuracy},
              {"test_loss", report.test_loss},
              {"test_accuracy", report.test_accuracy},
              {"epoch_losses", report.epoch_losses}});
  log << kind << ": test loss " << fixed(report.test_loss, 4) << ", test accuracy "
      << fixed(report.test_accuracy, 3) << "\n";
}

bool cmd_sweep(const RunConfig& cfg, const fs::path& features, std::ostream& log) {
  validate(cfg);
  const auto data = prepare_data(cfg, features);
  const auto tmpl = cfg.model_spec(nn::ModelKind::ANN, data.input_dim, 1);
  log << "sweeping " << cfg.grid.size() << " runs on " << data.train.rows.size() << " train / "
      << data.test.rows.size() << " test rows\n";
  const auto result =
      experiment::run_sweep(cfg.grid, data.train, data.test, tmpl, {cfg.effective_jobs(), cfg.record_timing});

  prepare_out(cfg);
  experiment::save_sweep(result, cfg.out / "sweep.csv");
  bool all_kinds_ok = true;
  for (auto kind : cfg.grid.kinds) {
    const std::string name = nn::to_string(kind);
    std::size_t failed = 0;
    for (const auto& r : result.rows) failed += r.kind == kind && !r.ok();
    try {
      const auto best = experiment::best_config(result, kind, cfg.objective);
      write_json(cfg.out / ("best_" + name + ".json"), best_json(best, result, cfg.objective));
      log << name << ": best epochs=" << best.epochs << " lr=" << text::format_double(best.lr)
          << " nodes=" << best.nodes << " mean " << experiment::to_string(cfg.objective) << "="
          << fixed(best.mean_loss, 4) << " (" << failed << " failed runs)\n";
    } catch (const EmptyResult& e) {
      all_kinds_ok = false;
      log << name << ": " << e.what() << "\n";
    }
    text::write_file_atomic(cfg.out / ("loss_by_lr_" + name + ".svg"),
                            report::loss_by_lr_svg(result, kind, cfg.objective));
  }
  return all_kinds_ok;
}

void cmd_analyze(const RunConfig& cfg, const fs::path& sweep, const fs::path& features, bool include_raw,
                 std::ostream& log) {
  validate(cfg);
  const auto result = experiment::load_sweep(sweep);
  const auto kinds = kinds_in(result);
  if (kinds.empty()) throw EmptyResult(sweep.string() + " has no rows");

  // Regressions first: TooFewRows must fail before anything is written.
  json models = json::array(), raw = json::array();
  std::map<nn::ModelKind, double> r2;
  for (auto kind : kinds) {
    const auto reg = stats::loss_regression(result, kind, cfg.objective);
    r2[kind] = reg.fit.r_squared;
    models.push_back(stats::to_json(reg));
    if (include_raw)
      raw.push_back(stats::to_json(
          stats::loss_regression(result, kind, cfg.objective, stats::RegressorEncoding::raw)));
    log << nn::to_string(kind) << ": R^2 = " << fixed(reg.fit.r_squared, 4) << " over " << reg.fit.n
        << " runs\n";
  }
  json report = {{"objective", experiment::to_string(cfg.objective)}, {"models", models}};
  if (include_raw) report["raw_encoding"] = raw;
  if (r2.count(nn::ModelKind::ANN) && r2.count(nn::ModelKind::KAN))
    report["ann_r2_exceeds_kan_r2"] = r2[nn::ModelKind::ANN] > r2[nn::ModelKind::KAN];

  std::vector<std::pair<std::string, std::string>> outputs;
  if (!features.empty()) {
    const auto data = prepare_data(cfg, features);
    for (auto kind : kinds) {
      const auto best = experiment::best_config(result, kind, cfg.objective);
      const auto seed = best.seeds.front();
      const auto spec = cfg.model_spec(kind, data.input_dim, best.nodes);
      const auto [params, rep] = nn::train(spec, data.train, data.test, {best.epochs, best.lr, seed});
      const auto cm = experiment::confusion(params, spec, data.test);
      // The retrained run should reproduce its sweep row exactly when the
      // split settings match those used for the sweep.
      bool matches = false;
      for (const auto& r : result.rows)
        if (r.ok() && r.key() == std::make_tuple(kind, best.epochs, best.lr, best.nodes, seed))
          matches = r.test_loss == rep.test_loss;
      const std::string name = nn::to_string(kind);
      json cj = {{"kind", name},
                 {"epochs", best.epochs},
                 {"lr", best.lr},
                 {"nodes", best.nodes},
                 {"seed", seed},
                 {"class_names", cm.class_names},
                 {"counts", cm.counts},
                 {"total", cm.total()},
                 {"accuracy", cm.accuracy()},
                 {"test_loss", rep.test_loss},
                 {"matches_sweep_row", matches}};
      outputs.emplace_back("confusion_" + name + ".json", cj.dump(2) + "\n");
      outputs.emplace_back("confusion_" + name + ".svg",
                           report::confusion_svg(cm, name + " confusion matrix (epochs " +
                                                         std::to_string(best.epochs) + ", lr " +
                                                         text::format_double(best.lr) + ", nodes " +
                                                         std::to_string(best.nodes) + ")"));
      if (!matches) log << name << ": warning: retrained test loss differs from the sweep row\n";
      log << name << ": confusion accuracy " << fixed(cm.accuracy(), 3) << " on " << cm.total()
          << " test rows\n";
    }
  }

  prepare_out(cfg);
  write_json(cfg.out / "ols_report.json", report);
  for (const auto& [name, content] : outputs) text::write_file_atomic(cfg.out / name, content);
}

void cmd_report(const RunConfig& cfg, const fs::path& sweep, std::ostream& log) {
  validate(cfg);
  const auto result = experiment::load_sweep(sweep);
  const auto kinds = kinds_in(result);
  if (kinds.empty()) throw EmptyResult(sweep.string() + " has no rows");

  std::size_t ok = 0;
  for (const auto& r : result.rows) ok += r.ok();
  std::ostringstream md;
  md << "# Sweep report\n\n"
     << "Source: `" << sweep.filename().string() << "`, " << result.rows.size() << " runs (" << ok
     << " ok, " << result.rows.size() - ok << " failed). Objective: "
     << experiment::to_string(cfg.objective) << ".\n\n"
     << "## Best configurations\n\n"
     << "| kind | epochs | lr | nodes | mean loss | mean test accuracy | seeds |\n"
     << "|---|---|---|---|---|---|---|\n";
  for (auto kind : kinds) {
    try {
      const auto b = experiment::best_config(result, kind, cfg.objective);
      const auto j = best_json(b, result, cfg.objective);
      md << "| " << nn::to_string(kind) << " | " << b.epochs << " | " << text::format_double(b.lr) << " | "
         << b.nodes << " | " << fixed(b.mean_loss, 4) << " | "
         << fixed(j["mean_test_accuracy"].get<double>(), 3) << " | " << b.seeds.size() << " |\n";
    } catch (const EmptyResult&) {
      md << "| " << nn::to_string(kind) << " | - | - | - | - | - | 0 |\n";
    }
  }

  md << "\n## Loss regression on epochs, log10(lr) and nodes\n\n"
     << "| kind | R^2 | runs | dropped regressors |\n|---|---|---|---|\n";
  std::map<nn::ModelKind, double> r2;
  for (auto kind : kinds) {
    try {
      const auto reg = stats::loss_regression(result, kind, cfg.objective);
      r2[kind] = reg.fit.r_squared;
      std::string dropped;
      for (const auto& d : reg.dropped_columns) dropped += (dropped.empty() ? "" : ", ") + d;
      md << "| " << nn::to_string(kind) << " | " << fixed(reg.fit.r_squared, 4) << " | " << reg.fit.n << " | "
         << (dropped.empty() ? "-" : dropped) << " |\n";
    } catch (const TooFewRows& e) {
      md << "| " << nn::to_string(kind) << " | n/a | - | too few successful runs |\n";
    }
  }
  if (r2.count(nn::ModelKind::ANN) && r2.count(nn::ModelKind::KAN)) {
    const bool echo = r2[nn::ModelKind::ANN] > r2[nn::ModelKind::KAN];
    md << "\nANN R^2 " << (echo ? "exceeds" : "does not exceed")
       << " KAN R^2: the KAN objective is " << (echo ? "less" : "not less")
       << " explained by the swept hyperparameters.\n";
  }

  prepare_out(cfg);
  text::write_file_atomic(cfg.out / "report.md", md.str());
  log << "wrote " << (cfg.out / "report.md").string() << "\n";
}

// ------------------------------------------------------------------ parsing

namespace {

template <typename T>
void set_if(const CLI::Option* opt, const T& value, T& dst) {
  if (opt->count() > 0) dst = value;
}

std::vector<nn::ModelKind> to_kinds(const std::vector<std::string>& names) {
  std::vector<nn::ModelKind> kinds;
  for (const auto& n : names) kinds.push_back(nn::parse_model_kind(n));
  return kinds;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"EEG band-power benchmark of MLP (ANN) and Kolmogorov-Arnold (KAN) classifiers", "eegkan"};
  app.set_help_all_flag("--help-all", "Print help for every subcommand and exit");
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, out_dir;
  std::uint64_t seed = 0;
  std::size_t jobs = 0;
  auto* o_config = app.add_option("--config", config_path, "JSON config file; flags override its values");
  auto* o_seed = app.add_option("--seed", seed, "Seed for synthesis, splitting and training (default 42)");
  auto* o_out = app.add_option("--out", out_dir, "Output directory (default .)");
  auto* o_jobs = app.add_option("--jobs", jobs, "Worker threads (default: available cores)")
                     ->check(CLI::PositiveNumber);

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a synthetic recording corpus and manifest.csv");
  std::size_t n_per_class = 0;
  double noise = 0, duration = 0, rate = 0;
  auto* o_n = synth->add_option("-n,--n-per-class", n_per_class, "Subjects per class (default 20)");
  auto* o_noise = synth->add_option("--noise", noise, "White-noise standard deviation (default 1.0)");
  auto* o_dur = synth->add_option("--duration", duration, "Recording length in seconds (default 12)");
  auto* o_rate = synth->add_option("--sample-rate", rate, "Sampling rate in Hz (default 256)");

  // features
  auto* features = app.add_subcommand("features", "Extract band-power features into features.csv");
  std::string manifest;
  std::vector<std::string> channels;
  features->add_option("--manifest", manifest, "Manifest CSV with path,label[,excluded] columns")->required();
  auto* o_channels =
      features->add_option("--channels", channels, "Channels to use (default Fz F3 F4 T7 T8)")->delimiter(',');

  // train
  auto* train = app.add_subcommand("train", "Train one model; write a checkpoint and a JSON report");
  std::string train_features, train_kind;
  std::size_t train_epochs = 0, train_nodes = 0;
  double train_lr = 0, train_frac = 0;
  train->add_option("--features", train_features, "Feature CSV")->required();
  auto* o_tkind = train->add_option("--kind", train_kind, "ANN or KAN (default ANN)");
  auto* o_tepochs = train->add_option("--epochs", train_epochs, "Training epochs (default 500)");
  auto* o_tlr = train->add_option("--lr", train_lr, "Adam learning rate (default 0.01)");
  auto* o_tnodes = train->add_option("--nodes", train_nodes, "Hidden nodes (default 16)");
  auto* o_tfrac = train->add_option("--test-frac", train_frac, "Held-out fraction per class (default 0.2)");
  auto* o_tgender = train->add_flag("--with-gender", "Append gender as an extra feature");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Grid search over epochs x lr x nodes for each model kind");
  std::string sweep_features, objective;
  std::vector<std::size_t> s_epochs, s_nodes;
  std::vector<double> s_lrs;
  std::vector<std::string> s_kinds;
  std::vector<std::uint64_t> s_seeds;
  double sweep_frac = 0;
  sweep->add_option("--features", sweep_features, "Feature CSV")->required();
  auto* o_sepochs = sweep->add_option("--epochs", s_epochs, "Epoch grid (default 100,250,500,1000)")->delimiter(',');
  auto* o_slr = sweep->add_option("--lr", s_lrs, "Learning-rate grid (default 0.0001,0.001,0.01,0.1)")->delimiter(',');
  auto* o_snodes = sweep->add_option("--nodes", s_nodes, "Hidden-node grid (default 4,16,64,260)")->delimiter(',');
  auto* o_skinds = sweep->add_option("--kinds", s_kinds, "Model kinds (default ANN,KAN)")->delimiter(',');
  auto* o_sseeds = sweep->add_option("--seeds", s_seeds, "Model seeds (default 1,2,3)")->delimiter(',');
  auto* o_sobj = sweep->add_option("--objective", objective, "test_loss (default) or train_loss");
  auto* o_sfrac = sweep->add_option("--test-frac", sweep_frac, "Held-out fraction per class (default 0.2)");
  auto* o_sgender = sweep->add_flag("--with-gender", "Append gender as an extra feature");
  auto* o_timings = sweep->add_flag("--timings", "Record wall-clock seconds per run (output no longer reproducible)");

  // analyze
  auto* analyze = app.add_subcommand("analyze", "OLS loss regression and confusion matrices of the best configs");
  std::string analyze_sweep, analyze_features, a_objective;
  double analyze_frac = 0;
  analyze->add_option("--sweep", analyze_sweep, "Sweep CSV")->required();
  analyze->add_option("--features", analyze_features,
                      "Feature CSV used for the sweep; enables retraining and confusion matrices");
  auto* o_aobj = analyze->add_option("--objective", a_objective, "test_loss (default) or train_loss");
  auto* o_afrac = analyze->add_option("--test-frac", analyze_frac, "Held-out fraction used by the sweep");
  auto* o_agender = analyze->add_flag("--with-gender", "The sweep used gender as an extra feature");
  auto* o_raw = analyze->add_flag("--raw", "Also fit the regression on untransformed hyperparameters");

  // report
  auto* rep = app.add_subcommand("report", "Write a markdown summary of a sweep");
  std::string report_sweep, r_objective;
  rep->add_option("--sweep", report_sweep, "Sweep CSV")->required();
  auto* o_robj = rep->add_option("--objective", r_objective, "test_loss (default) or train_loss");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 2;
  }

  try {
    RunConfig cfg;
    if (o_config->count()) cfg = load_config(config_path);
    set_if(o_seed, seed, cfg.seed);
    if (o_out->count()) cfg.out = out_dir;
    set_if(o_jobs, jobs, cfg.jobs);

    auto objective_from = [&](const CLI::Option* o, const std::string& v) {
      if (o->count()) {
        try {
          cfg.objective = experiment::parse_objective(v);
        } catch (const Error& e) {
          throw UsageError(e.what());
        }
      }
    };
    auto kinds_from = [&](const std::vector<std::string>& v) {
      try {
        return to_kinds(v);
      } catch (const Error& e) {
        throw UsageError(e.what());
      }
    };

    if (*synth) {
      set_if(o_n, n_per_class, cfg.synth.n_per_class);
      set_if(o_noise, noise, cfg.synth.noise);
      set_if(o_dur, duration, cfg.synth.duration_s);
      set_if(o_rate, rate, cfg.synth.sample_rate_hz);
      cmd_synth(cfg, out);
    } else if (*features) {
      set_if(o_channels, channels, cfg.channels);
      cmd_features(cfg, manifest, out);
    } else if (*train) {
      if (o_tkind->count()) cfg.train.kind = kinds_from({train_kind}).front();
      set_if(o_tepochs, train_epochs, cfg.train.epochs);
      set_if(o_tlr, train_lr, cfg.train.lr);
      set_if(o_tnodes, train_nodes, cfg.train.nodes);
      set_if(o_tfrac, train_frac, cfg.test_frac);
      if (o_tgender->count()) cfg.with_gender = true;
      cmd_train(cfg, train_features, out);
    } else if (*sweep) {
      set_if(o_sepochs, s_epochs, cfg.grid.epochs);
      set_if(o_slr, s_lrs, cfg.grid.lrs);
      set_if(o_snodes, s_nodes, cfg.grid.nodes);
      if (o_skinds->count()) cfg.grid.kinds = kinds_from(s_kinds);
      set_if(o_sseeds, s_seeds, cfg.grid.seeds);
      objective_from(o_sobj, objective);
      set_if(o_sfrac, sweep_frac, cfg.test_frac);
      if (o_sgender->count()) cfg.with_gender = true;
      if (o_timings->count()) cfg.record_timing = true;
      if (!cmd_sweep(cfg, sweep_features, out)) {
        err << "error: at least one model kind had no successful run\n";
        return 1;
      }
    } else if (*analyze) {
      objective_from(o_aobj, a_objective);
      set_if(o_afrac, analyze_frac, cfg.test_frac);
      if (o_agender->count()) cfg.with_gender = true;
      cmd_analyze(cfg, analyze_sweep, analyze_features, o_raw->count() > 0, out);
    } else if (*rep) {
      objective_from(o_robj, r_objective);
      cmd_report(cfg, report_sweep, out);
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace eegkan::cli
