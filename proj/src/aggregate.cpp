#include "sitekit/aggregate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <thread>
#include <vector>

#include "sitekit/metrics.hpp"

namespace sitekit {

double aggregate(std::span<const double> raw_scores, Aggregation stat) {
  if (raw_scores.empty()) throw std::invalid_argument("aggregate: empty score list");
  if (std::any_of(raw_scores.begin(), raw_scores.end(), [](double v) { return !std::isfinite(v); }))
    throw std::invalid_argument("aggregate: non-finite score");
  switch (stat) {
    case Aggregation::min: return *std::min_element(raw_scores.begin(), raw_scores.end());
    case Aggregation::max: return *std::max_element(raw_scores.begin(), raw_scores.end());
    case Aggregation::mean: {
      std::vector<double> sorted(raw_scores.begin(), raw_scores.end());
      std::sort(sorted.begin(), sorted.end());
      const double mean =
          std::accumulate(sorted.begin(), sorted.end(), 0.0) / static_cast<double>(sorted.size());
      // Rounding can push the mean a hair outside [min, max] for near-equal values.
      return std::clamp(mean, sorted.front(), sorted.back());
    }
  }
  throw std::invalid_argument("aggregate: unknown statistic");
}

namespace {

bool same_parameters(const MetricConfig& a, const MetricConfig& b) {
  return a.transrate_eps == b.transrate_eps && a.logme_tol == b.logme_tol &&
         a.logme_max_iters == b.logme_max_iters && a.pinv_rcond == b.pinv_rcond &&
         a.standardize == b.standardize;
}

struct Job {
  std::size_t model;
  std::size_t subset;
  std::size_t metric;
};

}  // namespace

ScoreTable build_score_table(std::span<const CandidateModel> models,
                             std::span<const MetricConfig> metrics,
                             const ScoreTableOptions& options) {
  if (models.empty()) throw std::invalid_argument("build_score_table: empty suite");
  if (metrics.empty()) throw std::invalid_argument("build_score_table: no metrics requested");

  // Distinct metrics in canonical order, each with its requested aggregations.
  std::vector<MetricConfig> distinct;
  std::vector<std::vector<Aggregation>> aggs;
  for (Metric m : kAllMetrics) {
    const MetricConfig* first = nullptr;
    std::vector<Aggregation> wanted;
    for (const auto& cfg : metrics) {
      if (cfg.metric != m) continue;
      cfg.validate();
      if (first && !same_parameters(*first, cfg))
        throw std::invalid_argument("conflicting settings for metric " +
                                    std::string(to_string(m)));
      if (!first) first = &cfg;
      wanted.push_back(cfg.aggregation);
    }
    if (!first) continue;
    std::vector<Aggregation> ordered;
    for (Aggregation a : kAllAggregations)
      if (std::find(wanted.begin(), wanted.end(), a) != wanted.end()) ordered.push_back(a);
    distinct.push_back(*first);
    aggs.push_back(std::move(ordered));
  }

  std::vector<Job> jobs;
  for (std::size_t m = 0; m < models.size(); ++m)
    for (std::size_t k = 0; k < distinct.size(); ++k)
      for (std::size_t s = 0; s < models[m].subsets.size(); ++s) jobs.push_back({m, s, k});

  std::vector<double> results(jobs.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::size_t failed_at = jobs.size();
  std::mutex failure_mutex;

  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      const Job& j = jobs[i];
      const auto& model = models[j.model];
      const auto& subset = model.subsets[j.subset];
      try {
        results[i] = metrics::score(subset.features, subset.labels, distinct[j.metric]);
      } catch (const std::exception& e) {
        // Keep the earliest failing job so the reported error is deterministic.
        std::lock_guard lock(failure_mutex);
        if (i < failed_at) {
          failed_at = i;
          failure = std::make_exception_ptr(ScoringError(model.name, subset.subset_id, e.what()));
        }
      }
    }
  };

  const unsigned n_threads =
      std::max(1u, std::min<unsigned>(options.jobs, static_cast<unsigned>(jobs.size())));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  ScoreTable table;
  std::size_t i = 0;
  for (std::size_t m = 0; m < models.size(); ++m) {
    for (std::size_t k = 0; k < distinct.size(); ++k) {
      std::vector<double> per_subset;
      for (std::size_t s = 0; s < models[m].subsets.size(); ++s, ++i) {
        table.rows.push_back(
            {models[m].name, distinct[k].metric, models[m].subsets[s].subset_id, results[i]});
        per_subset.push_back(results[i]);
      }
      for (Aggregation a : aggs[k])
        table.aggregated.push_back(
            {models[m].name, distinct[k].metric, a, aggregate(per_subset, a)});
    }
  }
  return table;
}

std::vector<MetricConfig> expand_configs(std::span<const Metric> metrics,
                                         std::span<const Aggregation> aggregations,
                                         const MetricConfig& base) {
  std::vector<MetricConfig> out;
  for (Metric m : metrics)
    for (Aggregation a : aggregations) {
      MetricConfig cfg = base;
      cfg.metric = m;
      cfg.aggregation = a;
      out.push_back(cfg);
    }
  return out;
}

}  // namespace sitekit
