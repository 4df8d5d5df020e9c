#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace sitekit {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Labels = std::vector<int>;

// One group of labelled frames (typically one video) scored on its own.
// Rows of `features` are frames, columns are embedding dimensions.
struct EmbeddingSubset {
  std::string subset_id;
  Matrix features;
  Labels labels;

  std::size_t frames() const { return static_cast<std::size_t>(features.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(features.cols()); }
};

// A pretrained model represented only through its embeddings of the target
// data. `ground_truth` is the fine-tuned accuracy when known.
struct CandidateModel {
  std::string name;
  std::vector<EmbeddingSubset> subsets;
  std::optional<double> ground_truth;
};

enum class Metric { logme, hscore, transrate };
enum class Aggregation { mean, min, max };

inline constexpr Metric kAllMetrics[] = {Metric::logme, Metric::hscore, Metric::transrate};
inline constexpr Aggregation kAllAggregations[] = {Aggregation::mean, Aggregation::min,
                                                   Aggregation::max};

std::string_view to_string(Metric m);
std::string_view to_string(Aggregation a);
// Name as it appears in report tables, e.g. "LogME", "Hscore", "TransRate".
std::string_view display_name(Metric m);
Metric parse_metric(std::string_view s);
Aggregation parse_aggregation(std::string_view s);

struct MetricConfig {
  Metric metric = Metric::logme;
  Aggregation aggregation = Aggregation::mean;
  double transrate_eps = 1e-4;
  double logme_tol = 1e-5;
  int logme_max_iters = 100;
  // Relative singular-value cutoff for the H-Score pseudo-inverse; when unset
  // the cutoff is d * epsilon.
  std::optional<double> pinv_rcond;
  // Per-dimension z-scoring of features before any metric runs.
  bool standardize = false;

  // Throws std::invalid_argument when a parameter is out of range.
  void validate() const;
};

struct RawScore {
  std::string model;
  Metric metric;
  std::string subset_id;
  double score;
};

struct AggregatedScore {
  std::string model;
  Metric metric;
  Aggregation aggregation;
  double score;
};

struct ScoreTable {
  std::vector<RawScore> rows;
  std::vector<AggregatedScore> aggregated;

  // Raw per-subset scores of one (model, metric), in subset order.
  std::vector<double> raw_scores(std::string_view model, Metric metric) const;
  std::optional<double> global_score(std::string_view model, Metric metric,
                                     Aggregation aggregation) const;
  // Model names in first-appearance order.
  std::vector<std::string> models() const;
};

struct RankingEvaluation {
  double pearson_r = 0.0;
  double kendall_tau = 0.0;
  double weighted_tau = 0.0;
  int n_models = 0;
};

struct ModelValidation {
  std::string model;
  bool ok = true;
  std::vector<std::string> reasons;
};

struct ValidationReport {
  std::vector<ModelValidation> models;
  // Class count the suite was checked against (declared or inferred).
  int class_count = 0;

  bool ok() const;
  // All failure reasons, one per line, prefixed by the model name.
  std::string summary() const;
};

// Checks every structural invariant of the suite: N >= 2, d >= 1, finite
// features, label/row agreement, labels in range, one d and one C per model,
// unique subset ids, ground truth in [0,1], and one C across all models.
// Throws std::invalid_argument("empty suite") when `models` is empty.
ValidationReport validate_suite(std::span<const CandidateModel> models,
                                std::optional<int> class_count = std::nullopt);

// Dense 0-based relabelling of an arbitrary integer label alphabet.
class LabelEncoder {
 public:
  LabelEncoder() = default;

  // Builds the mapping from every label seen in `batches`. Labels that are
  // already dense in [0, declared) (or [0, K) without a declaration) map to
  // themselves; any other alphabet is sorted and renumbered.
  static LabelEncoder fit(std::span<const std::vector<std::int64_t>> batches,
                          std::optional<int> declared_classes = std::nullopt);

  Labels transform(std::span<const std::int64_t> raw) const;
  bool identity() const { return identity_; }
  int class_count() const { return class_count_; }
  // Sorted raw alphabet; position i holds the raw value mapped to class i
  // (empty for identity encoders).
  const std::vector<std::int64_t>& alphabet() const { return alphabet_; }

 private:
  std::vector<std::int64_t> alphabet_;
  bool identity_ = true;
  int class_count_ = 0;
};

}  // namespace sitekit
