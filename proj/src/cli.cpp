#include "sitekit/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <iostream>
#include <map>
#include <optional>

#include <CLI11.hpp>

#include "sitekit/ablation.hpp"
#include "sitekit/aggregate.hpp"
#include "sitekit/evaluate.hpp"
#include "sitekit/manifest.hpp"
#include "sitekit/metrics.hpp"
#include "sitekit/random.hpp"
#include "sitekit/report.hpp"
#include "sitekit/synth.hpp"

namespace sitekit::cli {

namespace {

std::string num(double v, const char* fmt = "%.17g") {
  char buf[48];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

std::string join(const std::vector<std::string>& items, const char* sep = ",") {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) out += (i ? sep : "") + items[i];
  return out;
}

// Options shared by every command that scores a manifest.
struct ScoringOptions {
  std::string manifest;
  std::vector<std::string> metrics{"all"};
  std::vector<std::string> aggregations{"all"};
  std::optional<double> eps;
  std::optional<double> logme_tol;
  std::optional<int> logme_max_iters;
  bool standardize = false;
  unsigned jobs = 1;
  std::string out = "sitekit_report";
  std::string format = "csv";
  std::string sgn_mode = "standard";
};

void add_scoring_options(CLI::App* cmd, ScoringOptions& o, bool multi) {
  cmd->add_option("manifest", o.manifest, "Suite manifest (JSON)")->required();
  const std::vector<std::string> metric_names{"logme", "hscore", "transrate", "all"};
  const std::vector<std::string> agg_names{"mean", "min", "max", "all"};
  auto* m = cmd->add_option("--metric", o.metrics, "Metric(s): logme, hscore, transrate, all")
                ->check(CLI::IsMember(metric_names));
  auto* a = cmd->add_option("--agg", o.aggregations, "Aggregation(s): mean, min, max, all")
                ->check(CLI::IsMember(agg_names));
  if (multi) {
    m->delimiter(',');
    a->delimiter(',');
  } else {
    m->expected(1);
    a->expected(1);
  }
  cmd->add_option("--eps", o.eps, "TransRate distortion epsilon")->check(CLI::PositiveNumber);
  cmd->add_option("--logme-tol", o.logme_tol, "LogME per-sample evidence tolerance")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--logme-max-iters", o.logme_max_iters, "LogME iteration cap")
      ->check(CLI::PositiveNumber);
  cmd->add_flag("--standardize", o.standardize, "Z-score every feature dimension first");
  cmd->add_option("--jobs,-j", o.jobs, "Parallel scoring workers")->check(CLI::PositiveNumber);
  cmd->add_option("--out,-o", o.out, "Output directory");
  cmd->add_option("--format", o.format, "Report format: csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--sgn-mode", o.sgn_mode, "Kendall sign convention: standard or paper-literal")
      ->check(CLI::IsMember({"standard", "paper-literal"}));
}

std::vector<Metric> selected_metrics(const std::vector<std::string>& names) {
  std::vector<Metric> out;
  for (Metric m : kAllMetrics)
    for (const auto& n : names)
      if (n == "all" || parse_metric(n) == m) {
        out.push_back(m);
        break;
      }
  return out;
}

std::vector<Aggregation> selected_aggregations(const std::vector<std::string>& names) {
  std::vector<Aggregation> out;
  for (Aggregation a : kAllAggregations)
    for (const auto& n : names)
      if (n == "all" || parse_aggregation(n) == a) {
        out.push_back(a);
        break;
      }
  return out;
}

// Built-in defaults, then manifest defaults, then command-line flags.
MetricConfig resolve_config(const ScoringOptions& o, const io::Suite& suite) {
  MetricConfig cfg;
  suite.defaults.apply(cfg);
  if (o.eps) cfg.transrate_eps = *o.eps;
  if (o.logme_tol) cfg.logme_tol = *o.logme_tol;
  if (o.logme_max_iters) cfg.logme_max_iters = *o.logme_max_iters;
  if (o.standardize) cfg.standardize = true;
  cfg.validate();
  return cfg;
}

io::Provenance make_provenance(const ScoringOptions& o, const MetricConfig& cfg,
                               const std::vector<Metric>& metrics,
                               const std::vector<Aggregation>& aggs) {
  io::Provenance p;
  p.tool = kToolVersion;
  std::vector<std::string> mnames, anames;
  for (Metric m : metrics) mnames.emplace_back(to_string(m));
  for (Aggregation a : aggs) anames.emplace_back(to_string(a));
  p.config = {{"manifest", o.manifest},
              {"metrics", join(mnames)},
              {"aggregations", join(anames)},
              {"transrate_eps", num(cfg.transrate_eps)},
              {"logme_tol", num(cfg.logme_tol)},
              {"logme_max_iters", std::to_string(cfg.logme_max_iters)},
              {"pinv_rcond", cfg.pinv_rcond ? num(*cfg.pinv_rcond) : "d*machine_epsilon"},
              {"standardize", cfg.standardize ? "true" : "false"},
              {"sgn_mode", o.sgn_mode}};
  for (Metric m : metrics) p.metric_variants[std::string(to_string(m))] = metrics::variant_note(m, cfg);
  return p;
}

std::map<std::string, double> ground_truth_of(const io::Suite& suite) {
  std::map<std::string, double> gt;
  for (const auto& m : suite.models)
    if (m.ground_truth) gt[m.name] = *m.ground_truth;
  return gt;
}

std::vector<std::string> models_without_truth(const io::Suite& suite) {
  std::vector<std::string> out;
  for (const auto& m : suite.models)
    if (!m.ground_truth) out.push_back(m.name);
  return out;
}

std::vector<io::EvaluationRecord> evaluate_all(const ScoreTable& table, const io::Suite& suite,
                                               const std::vector<Metric>& metrics,
                                               const std::vector<Aggregation>& aggs,
                                               const TauOptions& tau, const std::string& dataset) {
  const auto gt = ground_truth_of(suite);
  std::vector<io::EvaluationRecord> evals;
  for (Metric m : metrics)
    for (Aggregation a : aggs)
      evals.push_back({dataset, m, a, evaluate_ranking(table, gt, m, a, tau)});
  return evals;
}

void print_files(std::ostream& out, const std::vector<std::filesystem::path>& files) {
  for (const auto& f : files) out << "wrote " << f.string() << '\n';
}

struct Scored {
  io::Suite suite;
  MetricConfig cfg;
  std::vector<Metric> metrics;
  std::vector<Aggregation> aggs;
  ScoreTable table;
};

Scored score_suite(const ScoringOptions& o) {
  Scored s;
  s.suite = io::load_suite(o.manifest);
  s.cfg = resolve_config(o, s.suite);
  s.metrics = selected_metrics(o.metrics);
  s.aggs = selected_aggregations(o.aggregations);
  const auto configs = expand_configs(s.metrics, s.aggs, s.cfg);
  s.table = build_score_table(s.suite.models, configs, {o.jobs});
  return s;
}

std::string dataset_label(const io::Suite& suite, const std::string& override_name) {
  if (!override_name.empty()) return override_name;
  return suite.dataset_name.empty() ? "dataset" : suite.dataset_name;
}

int cmd_score(const ScoringOptions& o, std::ostream& out) {
  const Scored s = score_suite(o);
  io::ReportOptions ro;
  ro.out_dir = o.out;
  ro.format = io::parse_report_format(o.format);
  ro.ground_truth = ground_truth_of(s.suite);
  ro.provenance = make_provenance(o, s.cfg, s.metrics, s.aggs);

  for (const auto& a : s.table.aggregated)
    out << a.model << "  " << io::row_label(a.metric, a.aggregation) << "  "
        << num(a.score, "%.6f") << '\n';

  std::vector<io::EvaluationRecord> evals;
  if (models_without_truth(s.suite).empty() && s.suite.models.size() >= 2) {
    const TauOptions tau{parse_sgn_mode(o.sgn_mode), WeightScheme::hyperbolic};
    try {
      evals = evaluate_all(s.table, s.suite, s.metrics, s.aggs, tau, dataset_label(s.suite, ""));
    } catch (const std::invalid_argument& ex) {
      out << "note: correlations skipped: " << ex.what() << '\n';
    }
  }
  const auto files =
      evals.empty() ? io::write_scores(s.table, ro) : io::write_report(s.table, evals, ro);
  print_files(out, files);
  return kExitOk;
}

struct EvaluateOptions {
  ScoringOptions scoring;
  std::string table_tau = "weighted";
  std::string dataset;
};

int cmd_evaluate(const EvaluateOptions& e, std::ostream& out, std::ostream& err) {
  const auto& o = e.scoring;
  // Check ground truth before any scoring work.
  {
    const io::Suite suite = io::load_suite(o.manifest);
    const auto missing = models_without_truth(suite);
    if (!missing.empty()) {
      err << "error: missing ground truth for model" << (missing.size() > 1 ? "s: " : ": ")
          << join(missing, ", ") << '\n';
      return kExitFailure;
    }
  }
  const Scored s = score_suite(o);
  const TauOptions tau{parse_sgn_mode(o.sgn_mode), WeightScheme::hyperbolic};
  const auto evals = evaluate_all(s.table, s.suite, s.metrics, s.aggs, tau,
                                  dataset_label(s.suite, e.dataset));
  for (const auto& r : evals)
    out << io::row_label(r.metric, r.aggregation) << ": r=" << num(r.evaluation.pearson_r, "%.6f")
        << " tau=" << num(r.evaluation.kendall_tau, "%.6f")
        << " tau_w=" << num(r.evaluation.weighted_tau, "%.6f") << " (M=" << r.evaluation.n_models
        << ")\n";

  io::ReportOptions ro;
  ro.out_dir = o.out;
  ro.format = io::parse_report_format(o.format);
  ro.table_tau = e.table_tau == "plain" ? io::TableTau::plain : io::TableTau::weighted;
  ro.ground_truth = ground_truth_of(s.suite);
  ro.provenance = make_provenance(o, s.cfg, s.metrics, s.aggs);
  ro.provenance.config["table_tau"] = e.table_tau;
  print_files(out, io::write_report(s.table, evals, ro));
  return kExitOk;
}

struct AblateOptions {
  ScoringOptions scoring;
  std::string strategy = "remove_top_k";
  int k = 1;
  std::string plan;
  std::string select_by = "ground_truth";
  std::optional<int> max_steps;
};

int cmd_ablate(const AblateOptions& a, std::ostream& out, std::ostream& err) {
  const auto& o = a.scoring;
  const io::Suite suite = io::load_suite(o.manifest);
  const auto missing = models_without_truth(suite);
  if (!missing.empty()) {
    err << "error: missing ground truth for model" << (missing.size() > 1 ? "s: " : ": ")
        << join(missing, ", ") << '\n';
    return kExitFailure;
  }
  MetricConfig cfg = resolve_config(o, suite);
  cfg.metric = parse_metric(o.metrics.front());
  cfg.aggregation = parse_aggregation(o.aggregations.front());
  const std::vector<MetricConfig> configs{cfg};
  const ScoreTable table = build_score_table(suite.models, configs, {o.jobs});

  std::map<std::string, double> scores;
  for (const auto& row : table.aggregated) scores[row.model] = row.score;
  AblationOptions ao;
  ao.selection = parse_prune_selection(a.select_by);
  ao.max_steps = a.max_steps;
  ao.tau.sgn = parse_sgn_mode(o.sgn_mode);

  const AblationResult result =
      a.plan.empty()
          ? prune_and_evaluate(scores, ground_truth_of(suite), parse_prune_strategy(a.strategy), a.k, ao)
          : prune_sequence(scores, ground_truth_of(suite), parse_prune_plan(a.plan), ao);

  out << "step  n  acc_range  tau_w     removed\n";
  for (const auto& s : result.steps) {
    char line[96];
    std::snprintf(line, sizeof line, "%-5d %-2zu %-10.4f %-9.4f ", s.step, s.remaining.size(),
                  s.accuracy_range, s.weighted_tau);
    out << line << (s.removed.empty() ? "-" : join(s.removed, ";")) << '\n';
  }
  if (result.truncated) out << "(truncated: fewer than 3 models would remain)\n";

  std::filesystem::create_directories(o.out);
  const auto path = std::filesystem::path(o.out) / "ablation.csv";
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << io::render_ablation_csv(result);
  out << "wrote " << path.string() << '\n';
  return kExitOk;
}

struct SynthOptions {
  synth::SynthSpec spec;
  std::vector<double> separability;
  double sep_min = 0.5;
  double sep_max = 4.0;
  double holdout = 0.3;
  std::optional<std::uint64_t> gt_seed;
  bool no_ground_truth = false;
  std::string feature_dtype = "f8";
  std::string dataset_name = "synthetic";
  std::string out_dir;
};

int cmd_synth(SynthOptions s, std::ostream& out) {
  s.spec.separability = s.separability.empty()
                            ? synth::linear_sweep(s.sep_min, s.sep_max, s.spec.n_models)
                            : s.separability;
  auto suite = synth::generate_suite(s.spec);
  if (!s.no_ground_truth)
    synth::attach_pseudo_ground_truth(suite, s.holdout,
                                      s.gt_seed.value_or(random::splitmix64(s.spec.seed)));
  io::ExportOptions eo;
  eo.dataset_name = s.dataset_name;
  eo.class_count = s.spec.classes;
  eo.feature_dtype = s.feature_dtype == "f4" ? io::DType::f4 : io::DType::f8;
  const auto path = io::export_suite(suite, s.out_dir, eo);
  for (std::size_t i = 0; i < suite.size(); ++i) {
    out << suite[i].name << "  separability=" << num(s.spec.separability[i], "%.4g");
    if (suite[i].ground_truth) out << "  ground_truth=" << num(*suite[i].ground_truth, "%.4f");
    out << '\n';
  }
  out << "wrote " << path.string() << '\n';
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Transferability estimation toolkit: score pretrained-model embeddings, "
               "rank models, and evaluate rankings against fine-tuned accuracy.",
               "sitekit"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  ScoringOptions score_opts;
  auto* score = app.add_subcommand("score", "Score every model of a suite");
  add_scoring_options(score, score_opts, true);

  EvaluateOptions eval_opts;
  auto* evaluate = app.add_subcommand("evaluate", "Correlate aggregated scores with ground truth");
  add_scoring_options(evaluate, eval_opts.scoring, true);
  evaluate->add_option("--table-tau", eval_opts.table_tau, "Tau column of correlations.csv")
      ->check(CLI::IsMember({"weighted", "plain"}));
  evaluate->add_option("--dataset", eval_opts.dataset, "Dataset name for the table columns");

  AblateOptions ablate_opts;
  ablate_opts.scoring.metrics = {"logme"};
  ablate_opts.scoring.aggregations = {"mean"};
  auto* ablate = app.add_subcommand("ablate", "Prune extreme models and track weighted tau");
  add_scoring_options(ablate, ablate_opts.scoring, false);
  ablate->add_option("--strategy", ablate_opts.strategy, "remove_top_k, remove_bottom_k, remove_both")
      ->check(CLI::IsMember({"remove_top_k", "remove_bottom_k", "remove_both"}));
  ablate->add_option("--k", ablate_opts.k, "Models removed per end per step")
      ->check(CLI::PositiveNumber);
  ablate->add_option("--plan", ablate_opts.plan, "Explicit steps, e.g. top:3,bottom:3");
  ablate->add_option("--select-by", ablate_opts.select_by, "ground_truth or score")
      ->check(CLI::IsMember({"ground_truth", "score"}));
  ablate->add_option("--max-steps", ablate_opts.max_steps, "Cap on repeated steps")
      ->check(CLI::PositiveNumber);

  SynthOptions synth_opts;
  auto* syn = app.add_subcommand("synth", "Generate a synthetic Gaussian-blob model zoo");
  syn->add_option("--models", synth_opts.spec.n_models, "Number of models")->check(CLI::PositiveNumber);
  syn->add_option("--classes", synth_opts.spec.classes, "Number of classes")->check(CLI::Range(2, 1 << 20));
  syn->add_option("--subsets", synth_opts.spec.subsets, "Subsets per model")->check(CLI::PositiveNumber);
  syn->add_option("--frames", synth_opts.spec.frames_per_subset, "Frames per subset")
      ->check(CLI::Range(2, 1 << 30));
  syn->add_option("--dim", synth_opts.spec.dim, "Embedding dimension")->check(CLI::PositiveNumber);
  syn->add_option("--separability", synth_opts.separability, "Per-model separability list")
      ->delimiter(',');
  syn->add_option("--sep-min", synth_opts.sep_min, "Sweep start when no list is given");
  syn->add_option("--sep-max", synth_opts.sep_max, "Sweep end when no list is given");
  syn->add_option("--noise", synth_opts.spec.noise_sigma, "Within-class sigma")
      ->check(CLI::PositiveNumber);
  syn->add_option("--seed", synth_opts.spec.seed, "Master seed");
  syn->add_option("--holdout", synth_opts.holdout, "Holdout fraction for pseudo ground truth")
      ->check(CLI::Range(0.0, 1.0));
  syn->add_option("--gt-seed", synth_opts.gt_seed, "Seed of the ground-truth split");
  syn->add_flag("--no-ground-truth", synth_opts.no_ground_truth, "Skip pseudo ground truth");
  syn->add_option("--feature-dtype", synth_opts.feature_dtype, "f4 or f8")
      ->check(CLI::IsMember({"f4", "f8"}));
  syn->add_option("--dataset-name", synth_opts.dataset_name, "Dataset name in the manifest");
  syn->add_option("--out-dir", synth_opts.out_dir, "Output directory")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (*score) return cmd_score(score_opts, out);
    if (*evaluate) return cmd_evaluate(eval_opts, out, err);
    if (*ablate) return cmd_ablate(ablate_opts, out, err);
    if (*syn) return cmd_synth(synth_opts, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace sitekit::cli
