// Acceptance gate: one PASS/FAIL line per criterion; non-zero exit on any FAIL.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>

#include "sitekit/ablation.hpp"
#include "sitekit/aggregate.hpp"
#include "sitekit/cli.hpp"
#include "sitekit/evaluate.hpp"
#include "sitekit/manifest.hpp"
#include "sitekit/metrics.hpp"
#include "sitekit/random.hpp"
#include "sitekit/report.hpp"
#include "sitekit/synth.hpp"
#include "test_helpers.hpp"

namespace {

using namespace sitekit;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct Check {
  bool ok = true;
  std::string detail;

  void expect(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// Every (model, metric) of the tables seen so far is checked for min <= mean <= max.
std::vector<ScoreTable> g_tables;

Check logme_oracle() {
  Check c;
  const auto t0 = Clock::now();
  std::mt19937_64 rng(20240601);
  int instances = 0, targets = 0;
  double worst = std::numeric_limits<double>::infinity();
  for (; instances < 24; ++instances) {
    const Eigen::Index n = 6 + static_cast<Eigen::Index>(rng() % 45);
    const Eigen::Index d = 1 + static_cast<Eigen::Index>(rng() % 8);
    const int classes = 2 + static_cast<int>(rng() % 3);
    const Matrix f = testing::random_matrix(rng, n, d);
    const Labels y = testing::random_labels(rng, static_cast<std::size_t>(n), classes);
    const metrics::LogmeSpectrum spectrum(f);
    for (int k = 0; k < classes; ++k, ++targets) {
      const Vector t = testing::one_hot(y, k);
      const double fp = spectrum.maximize(t, 1e-5, 100).evidence;
      const double grid = testing::grid_max_log_evidence(f, t);
      worst = std::min(worst, fp - grid);
      c.expect(fp >= grid - 1e-3, "instance " + std::to_string(instances) + " class " +
                                      std::to_string(k) + " below grid by " + fmt("%.3g", grid - fp));
    }
  }
  const double secs = seconds_since(t0);
  c.expect(secs < 10.0, "runtime " + fmt("%.2f", secs) + " s");
  if (c.ok)
    c.detail = std::to_string(instances) + " instances, " + std::to_string(targets) +
               " targets, min(fixed point - grid) = " + fmt("%.3g", worst) + ", " +
               fmt("%.2f", secs) + " s";
  return c;
}

Check hscore_fixed_points() {
  Check c;
  Matrix line(4, 1);
  line << 1, 1, -1, -1;
  const double h1 = metrics::hscore(line, Labels{0, 0, 1, 1}, MetricConfig{});
  c.expect(std::abs(h1 - 1.0) <= 1e-12, "two-class H = " + fmt("%.17g", h1));
  Matrix same(4, 2);
  same << 1, 2, -1, -2, 1, 2, -1, -2;
  const double h0 = metrics::hscore(same, Labels{0, 0, 1, 1}, MetricConfig{});
  c.expect(std::abs(h0) <= 1e-9, "coincident-means H = " + fmt("%.3g", h0));
  if (c.ok) c.detail = "H = " + fmt("%.17g", h1) + " and " + fmt("%.3g", h0);
  return c;
}

Check transrate_zero_and_monotone() {
  Check c;
  MetricConfig cfg;
  cfg.metric = Metric::transrate;
  const Matrix constant = Matrix::Constant(12, 4, -0.75);
  const Labels y{0, 1, 2, 0, 1, 2, 0, 1, 2, 0, 1, 2};
  const double zero = metrics::transrate(constant, y, cfg);
  c.expect(std::abs(zero) <= 1e-12, "constant features give " + fmt("%.3g", zero));

  std::mt19937_64 rng(77);
  int violations = 0;
  for (int i = 0; i < 10; ++i) {
    const Matrix f = testing::random_matrix(rng, 40 + 5 * i, 3 + i % 5);
    const Labels labels = testing::random_labels(rng, static_cast<std::size_t>(f.rows()), 2 + i % 3);
    double prev = -std::numeric_limits<double>::infinity();
    for (double eps : {100.0, 10.0, 1.0, 0.1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6}) {
      cfg.transrate_eps = eps;
      const double v = metrics::transrate(f, labels, cfg);
      if (v < prev - 1e-12) ++violations;
      prev = v;
    }
  }
  c.expect(violations == 0, std::to_string(violations) + " monotonicity violations");
  if (c.ok) c.detail = "constant -> " + fmt("%.3g", zero) + ", 10 instances monotone in 1/eps";
  return c;
}

Check separability_monotonicity() {
  Check c;
  const auto t0 = Clock::now();
  synth::SynthSpec spec;
  spec.n_models = 8;
  spec.classes = 5;
  spec.subsets = 3;
  spec.frames_per_subset = 600;
  spec.dim = 16;
  spec.separability = synth::linear_sweep(0.5, 4.0, 8);
  spec.seed = 2024;
  auto suite = synth::generate_suite(spec);
  synth::attach_pseudo_ground_truth(suite, 0.3, random::splitmix64(spec.seed));

  const auto cfgs = expand_configs(kAllMetrics, kAllAggregations, MetricConfig{});
  const ScoreTable table = build_score_table(suite, cfgs);
  g_tables.push_back(table);
  std::map<std::string, double> gt;
  for (const auto& m : suite) gt[m.name] = *m.ground_truth;

  std::string summary;
  for (Metric m : kAllMetrics) {
    const auto e = evaluate_ranking(table, gt, m, Aggregation::mean);
    if (m == Metric::logme)
      c.expect(e.weighted_tau >= 0.7, "logme tau_w = " + fmt("%.3f", e.weighted_tau));
    else
      c.expect(e.kendall_tau >= 0.5,
               std::string(to_string(m)) + " tau = " + fmt("%.3f", e.kendall_tau));
    summary += std::string(summary.empty() ? "" : ", ") + std::string(to_string(m)) +
               " tau=" + fmt("%.3f", e.kendall_tau) + " tau_w=" + fmt("%.3f", e.weighted_tau);
  }
  const double secs = seconds_since(t0);
  c.expect(secs < 60.0, "runtime " + fmt("%.2f", secs) + " s");
  if (c.ok) c.detail = summary + ", " + fmt("%.2f", secs) + " s";
  return c;
}

Check correlation_oracle() {
  Check c;
  std::mt19937_64 rng(4242);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int mismatches = 0, transform_failures = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t m = 2 + rng() % 11;
    std::vector<double> g(m), t(m);
    for (std::size_t i = 0; i < m; ++i) {
      g[i] = std::round(u(rng) * 8) / 8;
      t[i] = std::round(u(rng) * 8) / 8;
    }
    const double tau = kendall_tau(g, t);
    const double tau_w = weighted_kendall_tau(g, t);
    if (tau != testing::kendall_enumerated(g, t)) ++mismatches;
    if (std::abs(tau_w - testing::weighted_kendall_enumerated(g, t)) > 1e-15) ++mismatches;

    std::vector<double> g2 = g, t2 = t;
    for (double& x : g2) x = std::exp(2 * x) + 1;
    for (double& x : t2) x = x * x * x - 4;
    if (kendall_tau(g2, t2) != tau || weighted_kendall_tau(g2, t2) != tau_w) ++transform_failures;
  }
  c.expect(mismatches == 0, std::to_string(mismatches) + " oracle mismatches");
  c.expect(transform_failures == 0, std::to_string(transform_failures) + " transform failures");
  if (c.ok) c.detail = "100 vectors (M <= 12) match enumeration; monotone transforms exact";
  return c;
}

Check ablation_replication() {
  Check c;
  int strict = 0;
  const int trials = 50;
  const auto plan = parse_prune_plan("top:3,bottom:3");
  for (int trial = 0; trial < trials; ++trial) {
    random::Stream rng(random::substream_seed(99, static_cast<std::uint64_t>(trial)));
    std::vector<double> acc;
    for (int i = 0; i < 3; ++i) acc.push_back(0.20 + 0.20 * rng.uniform());
    for (int i = 0; i < 6; ++i) acc.push_back(0.60 + 0.04 * rng.uniform());
    for (int i = 0; i < 3; ++i) acc.push_back(0.85 + 0.10 * rng.uniform());
    const auto pool = synth::generate_score_pool(acc, 0.02, rng.next());
    const auto r = prune_sequence(pool.scores, pool.ground_truth, plan);
    if (r.steps.size() == 3 && r.steps[1].weighted_tau < r.steps[0].weighted_tau &&
        r.steps[2].weighted_tau < r.steps[1].weighted_tau)
      ++strict;
  }
  const double share = static_cast<double>(strict) / trials;
  c.expect(share >= 0.9, "strictly decreasing in " + std::to_string(strict) + "/50 trials");
  if (c.ok) c.detail = "strictly decreasing in " + std::to_string(strict) + "/50 trials";
  return c;
}

Check aggregation_bounds() {
  Check c;
  // Extra suites: single subset (identity) and several random shapes.
  synth::SynthSpec one;
  one.n_models = 3;
  one.classes = 3;
  one.subsets = 1;
  one.frames_per_subset = 50;
  one.dim = 4;
  one.separability = {0.5, 1.5, 3.0};
  one.seed = 8;
  const auto cfgs = expand_configs(kAllMetrics, kAllAggregations, MetricConfig{});
  const ScoreTable single = build_score_table(synth::generate_suite(one), cfgs);
  for (const auto& a : single.aggregated) {
    const auto raw = single.raw_scores(a.model, a.metric);
    c.expect(raw.size() == 1 && a.score == raw[0], "Z=1 identity broken for " + a.model);
  }
  synth::SynthSpec many = one;
  many.subsets = 7;
  many.frames_per_subset = 30;
  g_tables.push_back(single);
  g_tables.push_back(build_score_table(synth::generate_suite(many), cfgs));

  std::size_t checked = 0;
  for (const auto& table : g_tables)
    for (const auto& model : table.models())
      for (Metric m : kAllMetrics) {
        const auto lo = table.global_score(model, m, Aggregation::min);
        const auto mean = table.global_score(model, m, Aggregation::mean);
        const auto hi = table.global_score(model, m, Aggregation::max);
        if (!lo || !mean || !hi) continue;
        ++checked;
        c.expect(*lo <= *mean && *mean <= *hi, "bounds broken for " + model);
      }
  c.expect(checked > 0, "nothing checked");
  if (c.ok) c.detail = std::to_string(checked) + " (model, metric) pairs within [min, max]; Z=1 identity holds";
  return c;
}

Check io_round_trips() {
  Check c;
  const auto dir = testing::scratch_dir("acceptance_io");
  std::mt19937_64 rng(5);
  const Matrix m = testing::random_matrix(rng, 64, 16);
  for (io::DType t : {io::DType::f8, io::DType::f4}) {
    io::write_matrix(dir / "a.npy", m, t);
    io::write_matrix(dir / "b.npy", io::read_matrix(dir / "a.npy"), t);
    c.expect(testing::file_bytes(dir / "a.npy") == testing::file_bytes(dir / "b.npy"),
             "NPY round trip differs for " + std::string(io::descr(t)));
  }

  const auto labels = io::read_labels(fs::path(SITEKIT_TEST_DATA) / "labels_0_9_i8.npy");
  bool golden = labels.size() == 10;
  for (std::size_t i = 0; golden && i < labels.size(); ++i) golden = labels[i] == static_cast<std::int64_t>(i);
  c.expect(golden, "golden label file did not parse to 0..9");

  synth::SynthSpec spec;
  spec.n_models = 3;
  spec.classes = 4;
  spec.subsets = 2;
  spec.frames_per_subset = 40;
  spec.dim = 5;
  spec.separability = {1.0, 2.0, 3.0};
  spec.seed = 31;
  auto models = synth::generate_suite(spec);
  synth::attach_pseudo_ground_truth(models, 0.3, 7);
  for (io::DType t : {io::DType::f8, io::DType::f4}) {
    io::ExportOptions opts;
    opts.feature_dtype = t;
    const auto suite = io::load_suite(io::export_suite(models, dir / ("suite_" + std::string(io::descr(t)).substr(1)), opts));
    bool same = suite.models.size() == models.size();
    for (std::size_t i = 0; same && i < models.size(); ++i) {
      same = suite.models[i].name == models[i].name && suite.models[i].ground_truth == models[i].ground_truth &&
             suite.models[i].subsets.size() == models[i].subsets.size();
      for (std::size_t s = 0; same && s < models[i].subsets.size(); ++s) {
        const Matrix expect = t == io::DType::f4
                                  ? Matrix(models[i].subsets[s].features.cast<float>().cast<double>())
                                  : models[i].subsets[s].features;
        same = suite.models[i].subsets[s].features == expect &&
               suite.models[i].subsets[s].labels == models[i].subsets[s].labels;
      }
    }
    c.expect(same, "load_suite(export_suite(x)) != x for " + std::string(io::descr(t)));
  }

  io::EvaluationRecord rec;
  rec.dataset = "AutoLaparo";
  rec.evaluation = {0.627, 0.6, 0.833, 15};
  const std::string csv = io::render_correlation_csv({rec});
  c.expect(csv.find("\nLogME (mean), 0.627, 0.833\n") != std::string::npos, "fixture row differs: " + csv);
  if (c.ok) c.detail = "NPY f4/f8 byte-identical; golden labels; export/load identity; table row verbatim";
  return c;
}

std::string strip_timestamp(const std::string& text) {
  std::istringstream in(text);
  std::string line, out;
  while (std::getline(in, line))
    if (line.find("\"generated_at\"") == std::string::npos) out += line + "\n";
  return out;
}

Check score_determinism() {
  Check c;
  const auto dir = testing::scratch_dir("acceptance_determinism");
  std::ostringstream sink;
  const auto suite = (dir / "suite").string();
  c.expect(cli::run({"synth", "--models", "5", "--classes", "3", "--subsets", "3", "--frames", "80",
                     "--dim", "6", "--seed", "17", "--out-dir", suite},
                    sink, sink) == 0,
           "synth failed");
  const auto manifest = (dir / "suite" / "manifest.json").string();
  for (const char* out : {"a", "b"})
    c.expect(cli::run({"score", manifest, "--out", (dir / out).string()}, sink, sink) == 0,
             "score failed");
  std::size_t files = 0;
  for (const auto& entry : fs::directory_iterator(dir / "a")) {
    const auto name = entry.path().filename();
    const auto other = dir / "b" / name;
    ++files;
    if (name == "report.json")
      c.expect(strip_timestamp(testing::file_text(entry.path())) == strip_timestamp(testing::file_text(other)),
               "report.json differs");
    else
      c.expect(testing::file_bytes(entry.path()) == testing::file_bytes(other), name.string() + " differs");
  }
  c.expect(files >= 5, "expected a full report, found " + std::to_string(files) + " files");
  if (c.ok) c.detail = std::to_string(files) + " report files byte-identical across runs";
  return c;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Check()>>> criteria{
      {"LogME oracle equivalence", logme_oracle},
      {"H-Score analytic fixed points", hscore_fixed_points},
      {"TransRate zero case and eps monotonicity", transrate_zero_and_monotone},
      {"Separability monotonicity", separability_monotonicity},
      {"Correlation correctness", correlation_oracle},
      {"Ablation replication", ablation_replication},
      {"Aggregation bounds", aggregation_bounds},
      {"I/O", io_round_trips},
      {"Determinism", score_determinism},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Check c;
    try {
      c = fn();
    } catch (const std::exception& e) {
      c.ok = false;
      c.detail = std::string("exception: ") + e.what();
    }
    std::cout << (c.ok ? "PASS " : "FAIL ") << name << ": " << c.detail << std::endl;
    failed += !c.ok;
  }
  std::cout << (failed ? "FAILED " : "ALL PASSED ") << criteria.size() - failed << "/"
            << criteria.size() << std::endl;
  return failed ? 1 : 0;
}
