#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "commands.hpp"
#include "config.hpp"
#include "eegkan/experiment/sweep.hpp"
#include "eegkan/nn/checkpoint.hpp"
#include "eegkan/text.hpp"

namespace fs = std::filesystem;
using namespace eegkan;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "eegkan");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir = fs::temp_directory_path() /
          ("eegkan_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  void TearDown() override { fs::remove_all(dir); }

  std::string p(const std::string& rel) const { return (dir / rel).string(); }
  std::string slurp(const std::string& rel) const { return text::read_file(dir / rel); }

  fs::path dir;
};

const std::vector<std::string> tiny_grid = {"--epochs", "20,40", "--lr", "0.01,0.1", "--nodes", "2,4",
                                            "--seeds", "1"};

}  // namespace

TEST_F(CliTest, SynthIsDeterministicAndFeedsFeatures) {
  ASSERT_EQ(invoke({"synth", "-n", "5", "--seed", "42", "--out", p("a")}).code, 0);
  ASSERT_EQ(invoke({"synth", "-n", "5", "--seed", "42", "--out", p("b")}).code, 0);
  std::size_t files = 0;
  for (const auto& e : fs::recursive_directory_iterator(dir / "a")) {
    if (!e.is_regular_file()) continue;
    ++files;
    const auto rel = fs::relative(e.path(), dir / "a");
    EXPECT_EQ(text::read_file(e.path()), text::read_file(dir / "b" / rel)) << rel;
  }
  EXPECT_EQ(files, 11u);

  const auto r = invoke({"features", "--manifest", p("a/manifest.csv"), "--out", p("f1")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("[10/10]"), std::string::npos);
  const auto ds = dataset::load_features(dir / "f1/features.csv");
  EXPECT_EQ(ds.rows.size(), 10u);
  ASSERT_EQ(invoke({"features", "--manifest", p("a/manifest.csv"), "--out", p("f2")}).code, 0);
  EXPECT_EQ(slurp("f1/features.csv"), slurp("f2/features.csv"));
}

TEST_F(CliTest, ZeroSubjectsIsUsageError) {
  const auto r = invoke({"synth", "-n", "0", "--out", p("z")});
  EXPECT_EQ(r.code, 2);
  EXPECT_FALSE(fs::exists(dir / "z"));
}

TEST_F(CliTest, UnreadableManifestPathIsReported) {
  text::write_file_atomic(dir / "manifest.csv", "path,label\nmissing/s1.csv,AD\n");
  const auto r = invoke({"features", "--manifest", p("manifest.csv"), "--out", p("o")});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("missing/s1.csv"), std::string::npos) << r.err;
  EXPECT_FALSE(fs::exists(dir / "o/features.csv"));

  const auto m = invoke({"features", "--manifest", p("nope.csv"), "--out", p("o")});
  EXPECT_EQ(m.code, 1);
  EXPECT_NE(m.err.find("nope.csv"), std::string::npos);
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(invoke({}).code, 2);
  EXPECT_EQ(invoke({"synth", "--bogus"}).code, 2);
  EXPECT_EQ(invoke({"frobnicate"}).code, 2);
  EXPECT_EQ(invoke({"features"}).code, 2);  // --manifest is required
  EXPECT_EQ(invoke({"sweep", "--features", "x.csv", "--kinds", "RNN"}).code, 2);
  EXPECT_EQ(invoke({"sweep", "--features", "x.csv", "--objective", "accuracy"}).code, 2);
  EXPECT_EQ(invoke({"--jobs", "0", "synth"}).code, 2);
}

TEST_F(CliTest, HelpListsEveryFlag) {
  const auto top = invoke({"--help"});
  EXPECT_EQ(top.code, 0);
  for (const char* f : {"--config", "--seed", "--out", "--jobs", "synth", "features", "train", "sweep",
                        "analyze", "report"})
    EXPECT_NE(top.out.find(f), std::string::npos) << f;
  const auto sw = invoke({"sweep", "--help"});
  EXPECT_EQ(sw.code, 0);
  for (const char* f : {"--features", "--epochs", "--lr", "--nodes", "--kinds", "--seeds", "--objective",
                        "--test-frac", "--with-gender", "--timings"})
    EXPECT_NE(sw.out.find(f), std::string::npos) << f;
  const auto all = invoke({"--help-all"});
  EXPECT_EQ(all.code, 0);
  for (const char* f : {"--n-per-class", "--manifest", "--channels", "--kind", "--sweep", "--raw"})
    EXPECT_NE(all.out.find(f), std::string::npos) << f;
}

TEST_F(CliTest, ConfigFileRejectsUnknownKeysAndFlagsWin) {
  text::write_file_atomic(dir / "bad.json", R"({"sweep": {"epoch": [10]}})");
  const auto bad = invoke({"--config", p("bad.json"), "synth", "--out", p("x")});
  EXPECT_EQ(bad.code, 2);
  EXPECT_NE(bad.err.find("sweep.epoch"), std::string::npos) << bad.err;
  text::write_file_atomic(dir / "broken.json", "{");
  EXPECT_EQ(invoke({"--config", p("broken.json"), "synth"}).code, 2);
  EXPECT_EQ(invoke({"--config", p("absent.json"), "synth"}).code, 2);

  text::write_file_atomic(dir / "cfg.json", R"({"seed": 7, "synth": {"n_per_class": 0}})");
  EXPECT_EQ(invoke({"--config", p("cfg.json"), "synth", "--out", p("x")}).code, 2);
  EXPECT_EQ(invoke({"--config", p("cfg.json"), "synth", "-n", "2", "--out", p("x")}).code, 0);
  EXPECT_TRUE(fs::exists(dir / "x/recordings/synth-HC-002.csv"));
}

TEST(CliConfig, JsonRoundTripAndPrecedence) {
  cli::RunConfig cfg;
  cfg.seed = 9;
  cfg.grid.epochs = {3, 5};
  cfg.grid.kinds = {nn::ModelKind::KAN};
  cfg.synth.profiles = {{dataset::Label::AD, {1, 2, 3, 4}}, {dataset::Label::HC, {4, 3, 2, 1}}};
  cfg.objective = experiment::Objective::train_loss;
  cli::RunConfig back;
  cli::apply_json(back, cli::to_json(cfg));
  EXPECT_EQ(cli::to_json(back), cli::to_json(cfg));

  cli::RunConfig partial;
  cli::apply_json(partial, {{"sweep", {{"lr", {0.5}}}}});
  EXPECT_EQ(partial.grid.lrs, std::vector<double>{0.5});
  EXPECT_EQ(partial.grid.epochs, cli::RunConfig{}.grid.epochs);

  EXPECT_THROW(cli::apply_json(partial, {{"model", {{"kan", {{"grid", 4}}}}}}), cli::UsageError);
  EXPECT_THROW(cli::apply_json(partial, {{"seed", "abc"}}), cli::UsageError);

  cli::RunConfig invalid;
  invalid.pipeline.filter.low_hz = 30;
  EXPECT_THROW(cli::validate(invalid), cli::UsageError);
  invalid = {};
  invalid.kan.grid_lo = 3;
  EXPECT_THROW(cli::validate(invalid), cli::UsageError);
  EXPECT_NO_THROW(cli::validate(cli::RunConfig{}));
}

TEST_F(CliTest, SweepAnalyzeReportPipeline) {
  ASSERT_EQ(invoke({"synth", "-n", "8", "--seed", "3", "--duration", "6", "--out", p("c")}).code, 0);
  ASSERT_EQ(invoke({"features", "--manifest", p("c/manifest.csv"), "--out", p("c")}).code, 0);

  std::vector<std::string> args{"sweep", "--features", p("c/features.csv"), "--out", p("s1")};
  args.insert(args.end(), tiny_grid.begin(), tiny_grid.end());
  const auto r1 = invoke(args);
  ASSERT_EQ(r1.code, 0) << r1.err;
  args[4] = p("s2");
  args.push_back("--jobs");
  args.push_back("3");
  ASSERT_EQ(invoke(args).code, 0);
  for (const char* f : {"sweep.csv", "best_ANN.json", "best_KAN.json", "loss_by_lr_ANN.svg", "loss_by_lr_KAN.svg"})
    EXPECT_EQ(slurp(std::string("s1/") + f), slurp(std::string("s2/") + f)) << f;
  const auto sweep = experiment::load_sweep(dir / "s1/sweep.csv");
  EXPECT_EQ(sweep.rows.size(), 16u);

  for (const char* o : {"a1", "a2"})
    ASSERT_EQ(invoke({"analyze", "--sweep", p("s1/sweep.csv"), "--features", p("c/features.csv"), "--raw",
                   "--out", p(o)})
                  .code,
              0);
  for (const char* f : {"ols_report.json", "confusion_ANN.json", "confusion_KAN.json", "confusion_ANN.svg",
                        "confusion_KAN.svg"})
    EXPECT_EQ(slurp(std::string("a1/") + f), slurp(std::string("a2/") + f)) << f;
  const auto ols = nlohmann::json::parse(slurp("a1/ols_report.json"));
  ASSERT_EQ(ols["models"].size(), 2u);
  for (const auto& m : ols["models"]) {
    EXPECT_GE(m["r_squared"].get<double>(), 0.0);
    EXPECT_LE(m["r_squared"].get<double>(), 1.0);
  }
  EXPECT_EQ(ols["raw_encoding"].size(), 2u);
  const auto cm = nlohmann::json::parse(slurp("a1/confusion_KAN.json"));
  EXPECT_EQ(cm["total"].get<std::size_t>(), 2u);  // floor(8 * 0.2) = 1 per class
  EXPECT_TRUE(cm["matches_sweep_row"].get<bool>());

  ASSERT_EQ(invoke({"report", "--sweep", p("s1/sweep.csv"), "--out", p("a1")}).code, 0);
  const auto md = slurp("a1/report.md");
  EXPECT_NE(md.find("| ANN |"), std::string::npos);
  EXPECT_NE(md.find("R^2"), std::string::npos);
}

TEST_F(CliTest, AnalyzeLinearLossesAndTooFewRows) {
  experiment::SweepResult r;
  for (std::size_t e : {100u, 200u, 300u, 400u, 500u, 600u})
    for (double lr : {0.01, 0.1}) {
      experiment::SweepRow row;
      row.kind = nn::ModelKind::ANN;
      row.epochs = e;
      row.lr = lr;
      row.nodes = 4;
      row.seed = 1;
      row.train_loss = row.test_loss = 1.0 - 0.001 * static_cast<double>(e);
      row.test_accuracy = 1.0;
      r.rows.push_back(row);
    }
  experiment::save_sweep(r, dir / "lin.csv");
  ASSERT_EQ(invoke({"analyze", "--sweep", p("lin.csv"), "--out", p("o")}).code, 0);
  const auto ols = nlohmann::json::parse(slurp("o/ols_report.json"));
  EXPECT_NEAR(ols["models"][0]["r_squared"].get<double>(), 1.0, 1e-12);

  r.rows.resize(4);
  experiment::save_sweep(r, dir / "short.csv");
  const auto res = invoke({"analyze", "--sweep", p("short.csv"), "--out", p("o2")});
  EXPECT_EQ(res.code, 1);
  EXPECT_NE(res.err.find("TooFewRows"), std::string::npos);
  EXPECT_FALSE(fs::exists(dir / "o2/ols_report.json"));
}

TEST_F(CliTest, TrainWritesReloadableCheckpoint) {
  ASSERT_EQ(invoke({"synth", "-n", "6", "--duration", "6", "--out", p("c")}).code, 0);
  ASSERT_EQ(invoke({"features", "--manifest", p("c/manifest.csv"), "--out", p("c")}).code, 0);
  for (const char* o : {"t1", "t2"}) {
    const auto r = invoke({"train", "--features", p("c/features.csv"), "--kind", "KAN", "--epochs", "30",
                        "--nodes", "3", "--out", p(o)});
    ASSERT_EQ(r.code, 0) << r.err;
  }
  EXPECT_EQ(slurp("t1/model_KAN.ckpt"), slurp("t2/model_KAN.ckpt"));
  EXPECT_EQ(slurp("t1/train_KAN.json"), slurp("t2/train_KAN.json"));
  const auto ck = nn::load_checkpoint(dir / "t1/model_KAN.ckpt");
  EXPECT_EQ(ck.spec.kind, nn::ModelKind::KAN);
  EXPECT_EQ(ck.spec.hidden_nodes, 3u);
  EXPECT_EQ(ck.epoch, 30u);
}

#ifdef EEGKAN_CLI_PATH
TEST(CliBinary, ExitCodesFromTheShell) {
  const std::string bin = EEGKAN_CLI_PATH;
  auto status = [](const std::string& cmd) {
    const int s = std::system((cmd + " >/dev/null 2>&1").c_str());
    return WEXITSTATUS(s);
  };
  EXPECT_EQ(status(bin + " --help"), 0);
  EXPECT_EQ(status(bin + " --no-such-flag"), 2);
  EXPECT_EQ(status(bin + " synth -n 0"), 2);
  EXPECT_EQ(status(bin + " features --manifest /nonexistent/manifest.csv --out /tmp"), 1);
}
#endif
