#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sitekit/ablation.hpp"
#include "sitekit/core.hpp"

namespace sitekit::io {

enum class ReportFormat { json, csv };
// Which Kendall variant fills the tau column of the correlation table.
enum class TableTau { weighted, plain };

ReportFormat parse_report_format(std::string_view s);

// One row cell group of the correlation table: a (metric, aggregation)
// evaluated on one dataset.
struct EvaluationRecord {
  std::string dataset;
  Metric metric = Metric::logme;
  Aggregation aggregation = Aggregation::mean;
  RankingEvaluation evaluation;
};

struct Provenance {
  std::string tool;
  std::string generated_at;  // the only non-deterministic field of a report
  std::map<std::string, std::string> config;
  std::map<std::string, std::string> metric_variants;
};

struct ReportOptions {
  std::filesystem::path out_dir = ".";
  ReportFormat format = ReportFormat::csv;
  TableTau table_tau = TableTau::weighted;
  std::map<std::string, double> ground_truth;  // feeds the scatter export
  Provenance provenance;
};

// "LogME (mean)" style row label.
std::string row_label(Metric metric, Aggregation aggregation);

// Results table: one row per (metric, aggregation), an r and a tau column
// per dataset, ", " separated, three decimals.
std::string render_correlation_csv(const std::vector<EvaluationRecord>& evals,
                                   TableTau tau = TableTau::weighted);
// model,metric,aggregation,global_score,ground_truth for models with ground truth.
std::string render_scatter_csv(const ScoreTable& table,
                               const std::map<std::string, double>& ground_truth);
std::string render_scores_csv(const ScoreTable& table);
std::string render_aggregated_csv(const ScoreTable& table);
std::string render_ablation_csv(const AblationResult& result);

std::string render_bundle(const ScoreTable& table, const std::vector<EvaluationRecord>& evals,
                          const Provenance& provenance);

struct Bundle {
  ScoreTable table;
  std::vector<EvaluationRecord> evals;
  Provenance provenance;
};
Bundle parse_bundle(const std::string& json_text);

// UTC ISO-8601 timestamp.
std::string utc_timestamp();

// Score-only output (no ground truth needed). Returns the written files.
std::vector<std::filesystem::path> write_scores(const ScoreTable& table,
                                                const ReportOptions& options);

// Full report: scores plus correlation table, scatter data, and JSON bundle.
// Throws std::invalid_argument for an empty table or an empty evals list.
std::vector<std::filesystem::path> write_report(const ScoreTable& table,
                                                const std::vector<EvaluationRecord>& evals,
                                                const ReportOptions& options);

}  // namespace sitekit::io
