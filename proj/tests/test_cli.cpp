#include <gtest/gtest.h>

#include <sstream>

#include "sitekit/cli.hpp"
#include "sitekit/report.hpp"
#include "test_helpers.hpp"

namespace sitekit {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

// Small synthetic suite shared by the tests below.
fs::path make_suite(const std::string& name, bool ground_truth = true) {
  const auto dir = testing::scratch_dir(name);
  std::vector<std::string> args{"synth", "--models", "4", "--classes", "3", "--subsets", "3",
                                "--frames", "60", "--dim", "4", "--seed", "5",
                                "--out-dir", (dir / "suite").string()};
  if (!ground_truth) args.push_back("--no-ground-truth");
  const auto r = run(args);
  EXPECT_EQ(r.code, 0) << r.err;
  return dir;
}

std::size_t line_count(const std::string& text) {
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

TEST(Cli, ScoreWritesEveryMetricAndAggregation) {
  const auto dir = make_suite("cli_score");
  const auto r = run({"score", (dir / "suite/manifest.json").string(), "--out", (dir / "out").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(line_count(testing::file_text(dir / "out/aggregated.csv")), 1u + 4u * 9u);
  EXPECT_EQ(line_count(testing::file_text(dir / "out/scores.csv")), 1u + 4u * 3u * 3u);
  EXPECT_TRUE(fs::exists(dir / "out/correlations.csv"));
  EXPECT_TRUE(fs::exists(dir / "out/scatter.csv"));
}

TEST(Cli, ScoreWithoutGroundTruthWritesScoresOnly) {
  const auto dir = make_suite("cli_score_nogt", false);
  const auto r = run({"score", (dir / "suite/manifest.json").string(), "-o", (dir / "out").string(),
                      "--metric", "hscore", "--agg", "min,max"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(line_count(testing::file_text(dir / "out/aggregated.csv")), 1u + 4u * 2u);
  EXPECT_FALSE(fs::exists(dir / "out/correlations.csv"));
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run({"score", "x.json", "--metric", "bogus"}).code, cli::kExitUsage);
  EXPECT_EQ(run({"score", "x.json", "--agg", "median"}).code, cli::kExitUsage);
  EXPECT_EQ(run({"frobnicate"}).code, cli::kExitUsage);
  EXPECT_EQ(run({}).code, cli::kExitUsage);
  EXPECT_EQ(run({"score", "x.json", "--eps", "-1"}).code, cli::kExitUsage);
  const auto r = run({"score", "x.json", "--metric", "bogus"});
  EXPECT_EQ(r.err.rfind("error:", 0), 0u);
}

TEST(Cli, HelpAndVersion) {
  const auto help = run({"--help"});
  EXPECT_EQ(help.code, 0);
  EXPECT_NE(help.out.find("score"), std::string::npos);
  const auto version = run({"--version"});
  EXPECT_EQ(version.code, 0);
  EXPECT_NE(version.out.find("0.1.0"), std::string::npos);
}

TEST(Cli, RuntimeFailuresExitOne) {
  const auto r = run({"score", "/nonexistent/manifest.json", "-o", "/tmp/sitekit_unused"});
  EXPECT_EQ(r.code, cli::kExitFailure);
  EXPECT_EQ(r.err.rfind("error:", 0), 0u);
}

TEST(Cli, EpsOnlyAffectsTransrate) {
  const auto dir = make_suite("cli_eps");
  const auto manifest = (dir / "suite/manifest.json").string();
  ASSERT_EQ(run({"score", manifest, "-o", (dir / "a").string(), "--format", "json"}).code, 0);
  ASSERT_EQ(run({"score", manifest, "-o", (dir / "b").string(), "--format", "json", "--eps", "0.5"}).code, 0);
  const auto a = io::parse_bundle(testing::file_text(dir / "a/report.json"));
  const auto b = io::parse_bundle(testing::file_text(dir / "b/report.json"));
  ASSERT_EQ(a.table.rows.size(), b.table.rows.size());
  for (std::size_t i = 0; i < a.table.rows.size(); ++i) {
    if (a.table.rows[i].metric == Metric::transrate)
      EXPECT_NE(a.table.rows[i].score, b.table.rows[i].score);
    else
      EXPECT_EQ(a.table.rows[i].score, b.table.rows[i].score);
  }
  EXPECT_EQ(b.provenance.config.at("transrate_eps"), "0.5");
}

TEST(Cli, EvaluateReportsCorrelations) {
  const auto dir = make_suite("cli_eval");
  const auto r = run({"evaluate", (dir / "suite/manifest.json").string(), "-o",
                      (dir / "out").string(), "--dataset", "Blobs"});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string csv = testing::file_text(dir / "out/correlations.csv");
  EXPECT_EQ(csv.rfind("Metric, Blobs (r), Blobs (tau)\n", 0), 0u);
  EXPECT_EQ(line_count(csv), 10u);
  EXPECT_NE(r.out.find("tau_w="), std::string::npos);
}

TEST(Cli, EvaluateNamesModelsWithoutGroundTruth) {
  const auto dir = make_suite("cli_eval_nogt", false);
  const auto r = run({"evaluate", (dir / "suite/manifest.json").string(), "-o", (dir / "out").string()});
  EXPECT_EQ(r.code, cli::kExitFailure);
  EXPECT_NE(r.err.find("model_00"), std::string::npos);
  EXPECT_NE(r.err.find("model_03"), std::string::npos);
  EXPECT_EQ(run({"ablate", (dir / "suite/manifest.json").string(), "-o", (dir / "out").string()}).code,
            cli::kExitFailure);
}

TEST(Cli, AblateWritesSteps) {
  const auto dir = testing::scratch_dir("cli_ablate");
  ASSERT_EQ(run({"synth", "--models", "8", "--classes", "3", "--subsets", "2", "--frames", "60",
                 "--dim", "4", "--seed", "9", "--out-dir", (dir / "suite").string()})
                .code,
            0);
  const auto r = run({"ablate", (dir / "suite/manifest.json").string(), "-o", (dir / "out").string(),
                      "--plan", "top:2,bottom:2"});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string csv = testing::file_text(dir / "out/ablation.csv");
  EXPECT_EQ(line_count(csv), 4u);
  EXPECT_EQ(csv.rfind("step,removed,n_remaining,accuracy_range,weighted_tau\n", 0), 0u);
  EXPECT_EQ(run({"ablate", (dir / "suite/manifest.json").string(), "-o", (dir / "out").string(),
                 "--metric", "logme,hscore"})
                .code,
            cli::kExitUsage);
}

TEST(Cli, RepeatedRunsAreByteIdenticalApartFromTimestamp) {
  const auto dir = make_suite("cli_determinism");
  const auto manifest = (dir / "suite/manifest.json").string();
  ASSERT_EQ(run({"score", manifest, "-o", (dir / "a").string()}).code, 0);
  ASSERT_EQ(run({"score", manifest, "-o", (dir / "b").string(), "-j", "3"}).code, 0);
  for (const char* f : {"scores.csv", "aggregated.csv", "correlations.csv", "scatter.csv"})
    EXPECT_EQ(testing::file_bytes(dir / "a" / f), testing::file_bytes(dir / "b" / f)) << f;
  auto a = io::parse_bundle(testing::file_text(dir / "a/report.json"));
  auto b = io::parse_bundle(testing::file_text(dir / "b/report.json"));
  a.provenance.generated_at = b.provenance.generated_at = "";
  EXPECT_EQ(io::render_bundle(a.table, a.evals, a.provenance),
            io::render_bundle(b.table, b.evals, b.provenance));
}

TEST(Cli, SynthIsDeterministic) {
  const auto a = make_suite("cli_synth_a");
  const auto b = make_suite("cli_synth_b");
  for (const char* f : {"manifest.json", "model_02/subset_01_features.npy", "model_02/subset_01_labels.npy"})
    EXPECT_EQ(testing::file_bytes(a / "suite" / f), testing::file_bytes(b / "suite" / f)) << f;
}

}  // namespace
}  // namespace sitekit
