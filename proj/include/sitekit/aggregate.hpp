#pragma once

#include <span>
#include <stdexcept>
#include <string>

#include "sitekit/core.hpp"

namespace sitekit {

// Metric failure annotated with the (model, subset) being scored.
class ScoringError : public std::runtime_error {
 public:
  ScoringError(std::string model, std::string subset, const std::string& what)
      : std::runtime_error("model '" + model + "', subset '" + subset + "': " + what),
        model_(std::move(model)),
        subset_(std::move(subset)) {}

  const std::string& model() const { return model_; }
  const std::string& subset() const { return subset_; }

 private:
  std::string model_;
  std::string subset_;
};

// Mean, minimum, or maximum of `raw_scores`. The mean sums in sorted order so
// the result does not depend on the order of the input.
double aggregate(std::span<const double> raw_scores, Aggregation stat);

struct ScoreTableOptions {
  unsigned jobs = 1;
};

// Scores every (model, subset) under each distinct metric in `metrics` and
// aggregates per requested (metric, aggregation). Configs sharing a metric
// must agree on every parameter except the aggregation. The suite must
// already pass validate_suite.
ScoreTable build_score_table(std::span<const CandidateModel> models,
                             std::span<const MetricConfig> metrics,
                             const ScoreTableOptions& options = {});

// One config per (metric, aggregation) pair drawn from the two lists, all
// sharing `base`'s parameters.
std::vector<MetricConfig> expand_configs(std::span<const Metric> metrics,
                                         std::span<const Aggregation> aggregations,
                                         const MetricConfig& base);

}  // namespace sitekit
