#include "sitekit/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace sitekit {

std::string_view to_string(SgnMode m) {
  return m == SgnMode::standard ? "standard" : "paper-literal";
}

SgnMode parse_sgn_mode(std::string_view s) {
  if (s == "standard") return SgnMode::standard;
  if (s == "paper-literal" || s == "paper_literal") return SgnMode::paper_literal;
  throw std::invalid_argument("unknown sgn mode '" + std::string(s) + "'");
}

namespace {

void check_pair(std::span<const double> g, std::span<const double> t) {
  if (g.size() != t.size()) throw std::invalid_argument("score vectors differ in length");
  if (g.size() < 2) throw std::invalid_argument("need at least 2 models");
  auto finite = [](double v) { return std::isfinite(v); };
  if (!std::all_of(g.begin(), g.end(), finite) || !std::all_of(t.begin(), t.end(), finite))
    throw std::invalid_argument("non-finite score");
}

int sgn(double x, SgnMode mode) {
  if (x > 0) return 1;
  if (mode == SgnMode::paper_literal) return -1;
  return x < 0 ? -1 : 0;
}

}  // namespace

double pearson_r(std::span<const double> g, std::span<const double> t) {
  check_pair(g, t);
  const double n = static_cast<double>(g.size());
  const double mg = std::accumulate(g.begin(), g.end(), 0.0) / n;
  const double mt = std::accumulate(t.begin(), t.end(), 0.0) / n;
  double sgg = 0.0, stt = 0.0, sgt = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double dg = g[i] - mg, dt = t[i] - mt;
    sgg += dg * dg;
    stt += dt * dt;
    sgt += dg * dt;
  }
  if (sgg == 0.0 || stt == 0.0) throw std::invalid_argument("zero variance");
  return std::clamp(sgt / std::sqrt(sgg * stt), -1.0, 1.0);
}

double kendall_tau(std::span<const double> g, std::span<const double> t, SgnMode mode) {
  check_pair(g, t);
  const std::size_t m = g.size();
  long long sum = 0;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j) sum += sgn(g[i] - g[j], mode) * sgn(t[i] - t[j], mode);
  return 2.0 * static_cast<double>(sum) / (static_cast<double>(m) * static_cast<double>(m - 1));
}

double weighted_kendall_tau(std::span<const double> g, std::span<const double> t,
                            const TauOptions& options) {
  check_pair(g, t);
  const std::size_t m = g.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (g[a] != g[b]) return g[a] > g[b];
    if (t[a] != t[b]) return t[a] > t[b];
    return a < b;
  });
  std::vector<double> weight(m);
  for (std::size_t p = 0; p < m; ++p)
    weight[order[p]] =
        options.weights == WeightScheme::hyperbolic ? 1.0 / static_cast<double>(p + 1) : 1.0;

  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j) {
      const double w = weight[i] + weight[j];
      num += sgn(g[i] - g[j], options.sgn) * sgn(t[i] - t[j], options.sgn) * w;
      den += w;
    }
  return num / den;
}

RankingEvaluation evaluate_vectors(std::span<const double> g, std::span<const double> t,
                                   const TauOptions& options) {
  RankingEvaluation e;
  e.pearson_r = pearson_r(g, t);
  e.kendall_tau = kendall_tau(g, t, options.sgn);
  e.weighted_tau = weighted_kendall_tau(g, t, options);
  e.n_models = static_cast<int>(g.size());
  return e;
}

RankingEvaluation evaluate_ranking(const ScoreTable& table,
                                   const std::map<std::string, double>& ground_truth,
                                   Metric metric, Aggregation aggregation,
                                   const TauOptions& options) {
  std::vector<double> g, t;
  std::vector<std::string> missing;
  for (const auto& name : table.models()) {
    const auto score = table.global_score(name, metric, aggregation);
    if (!score) continue;
    const auto it = ground_truth.find(name);
    if (it == ground_truth.end()) {
      missing.push_back(name);
      continue;
    }
    g.push_back(it->second);
    t.push_back(*score);
  }
  if (!missing.empty()) {
    std::string msg = "missing ground truth for model";
    msg += missing.size() > 1 ? "s: " : ": ";
    for (std::size_t i = 0; i < missing.size(); ++i) msg += (i ? ", " : "") + missing[i];
    throw std::invalid_argument(msg);
  }
  if (g.size() < 2)
    throw std::invalid_argument("need at least 2 models with " + std::string(to_string(metric)) +
                                " (" + std::string(to_string(aggregation)) + ") scores");
  return evaluate_vectors(g, t, options);
}

}  // namespace sitekit
