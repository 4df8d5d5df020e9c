#pragma once

#include <map>
#include <span>
#include <string>

#include "sitekit/core.hpp"

namespace sitekit {

// standard: sgn(0) = 0. paper_literal: sgn(x) = 1 if x > 0 else -1, so a tie
// counts as a negative sign.
enum class SgnMode { standard, paper_literal };

// Position weights for the weighted tau. uniform reduces it to plain tau.
enum class WeightScheme { hyperbolic, uniform };

std::string_view to_string(SgnMode m);
SgnMode parse_sgn_mode(std::string_view s);

struct TauOptions {
  SgnMode sgn = SgnMode::standard;
  WeightScheme weights = WeightScheme::hyperbolic;
};

// Sample Pearson correlation. Throws "zero variance" for a constant input.
double pearson_r(std::span<const double> g, std::span<const double> t);

// Kendall tau-a: 2 / (M (M - 1)) * sum_{i<j} sgn(g_i - g_j) sgn(t_i - t_j).
double kendall_tau(std::span<const double> g, std::span<const double> t,
                   SgnMode mode = SgnMode::standard);

// Weighted Kendall tau with hyperbolic weights 1/(p+1) on the position p of
// each element in the ranking by decreasing g (ties: decreasing t, then index).
// Each pair is weighted by the sum of its two position weights.
double weighted_kendall_tau(std::span<const double> g, std::span<const double> t,
                            const TauOptions& options = {});

// (r, tau, tau_w) of the chosen (metric, aggregation) column of `table`
// against ground truth. Models are taken in table order.
RankingEvaluation evaluate_ranking(const ScoreTable& table,
                                   const std::map<std::string, double>& ground_truth,
                                   Metric metric, Aggregation aggregation,
                                   const TauOptions& options = {});

RankingEvaluation evaluate_vectors(std::span<const double> g, std::span<const double> t,
                                   const TauOptions& options = {});

}  // namespace sitekit
