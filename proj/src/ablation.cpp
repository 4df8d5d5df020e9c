#include "sitekit/ablation.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace sitekit {

std::string_view to_string(PruneStrategy s) {
  switch (s) {
    case PruneStrategy::remove_top_k: return "remove_top_k";
    case PruneStrategy::remove_bottom_k: return "remove_bottom_k";
    case PruneStrategy::remove_both: return "remove_both";
  }
  return "?";
}

PruneStrategy parse_prune_strategy(std::string_view s) {
  for (auto v : {PruneStrategy::remove_top_k, PruneStrategy::remove_bottom_k,
                 PruneStrategy::remove_both})
    if (to_string(v) == s) return v;
  throw std::invalid_argument("unknown prune strategy '" + std::string(s) + "'");
}

PruneSelection parse_prune_selection(std::string_view s) {
  if (s == "ground_truth" || s == "ground-truth") return PruneSelection::ground_truth;
  if (s == "score") return PruneSelection::score;
  throw std::invalid_argument("unknown prune selection '" + std::string(s) + "'");
}

std::vector<PruneStep> parse_prune_plan(std::string_view plan) {
  std::vector<PruneStep> steps;
  std::stringstream ss{std::string(plan)};
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw std::invalid_argument("bad plan step '" + item + "'");
    const std::string end = item.substr(0, colon);
    PruneStep step;
    if (end == "top")
      step.end = PruneEnd::top;
    else if (end == "bottom")
      step.end = PruneEnd::bottom;
    else if (end == "both")
      step.end = PruneEnd::both;
    else
      throw std::invalid_argument("bad plan end '" + end + "'");
    try {
      step.k = std::stoi(item.substr(colon + 1));
    } catch (const std::exception&) {
      throw std::invalid_argument("bad plan count in '" + item + "'");
    }
    if (step.k < 1) throw std::invalid_argument("plan counts must be >= 1");
    steps.push_back(step);
  }
  if (steps.empty()) throw std::invalid_argument("empty prune plan");
  return steps;
}

namespace {

struct Entry {
  std::string name;
  double score;
  double truth;
};

class Pruner {
 public:
  Pruner(const std::map<std::string, double>& scores,
         const std::map<std::string, double>& ground_truth, const AblationOptions& options)
      : options_(options) {
    for (const auto& [name, score] : scores) {
      const auto it = ground_truth.find(name);
      if (it == ground_truth.end())
        throw std::invalid_argument("missing ground truth for model: " + name);
      pool_.push_back({name, score, it->second});
    }
    if (pool_.size() < 2) throw std::invalid_argument("ablation needs at least 2 models");
    sort_pool();
    result_.steps.push_back(snapshot({}));
  }

  // Returns false (and marks truncation) when the removal is not possible.
  bool apply(PruneEnd end, int k) {
    if (k < 1) throw std::invalid_argument("k must be >= 1");
    const std::size_t drop = static_cast<std::size_t>(k) * (end == PruneEnd::both ? 2 : 1);
    if (pool_.size() < drop + kMinAblationPool) {
      result_.truncated = true;
      return false;
    }
    std::vector<std::string> removed;
    auto take_top = [&] {
      for (int i = 0; i < k; ++i) {
        removed.push_back(pool_.front().name);
        pool_.erase(pool_.begin());
      }
    };
    auto take_bottom = [&] {
      // Lowest key first; among equal keys the name-ordered first goes first.
      for (int i = 0; i < k; ++i) {
        auto it = std::min_element(pool_.begin(), pool_.end(), [&](const Entry& a, const Entry& b) {
          if (key(a) != key(b)) return key(a) < key(b);
          return a.name < b.name;
        });
        removed.push_back(it->name);
        pool_.erase(it);
      }
    };
    if (end != PruneEnd::bottom) take_top();
    if (end != PruneEnd::top) take_bottom();
    result_.steps.push_back(snapshot(std::move(removed)));
    return true;
  }

  AblationResult result() && { return std::move(result_); }

 private:
  double key(const Entry& e) const {
    return options_.selection == PruneSelection::ground_truth ? e.truth : e.score;
  }

  // Decreasing key; equal keys ordered by name.
  void sort_pool() {
    std::sort(pool_.begin(), pool_.end(), [&](const Entry& a, const Entry& b) {
      if (key(a) != key(b)) return key(a) > key(b);
      return a.name < b.name;
    });
  }

  AblationStep snapshot(std::vector<std::string> removed) const {
    AblationStep s;
    s.step = static_cast<int>(result_.steps.size());
    s.removed = std::move(removed);
    std::vector<double> g, t;
    for (const auto& e : pool_) {
      s.remaining.push_back(e.name);
      g.push_back(e.truth);
      t.push_back(e.score);
    }
    const auto [lo, hi] = std::minmax_element(g.begin(), g.end());
    s.accuracy_range = *hi - *lo;
    s.weighted_tau = weighted_kendall_tau(g, t, options_.tau);
    return s;
  }

  AblationOptions options_;
  std::vector<Entry> pool_;
  AblationResult result_;
};

PruneEnd end_of(PruneStrategy s) {
  switch (s) {
    case PruneStrategy::remove_top_k: return PruneEnd::top;
    case PruneStrategy::remove_bottom_k: return PruneEnd::bottom;
    case PruneStrategy::remove_both: return PruneEnd::both;
  }
  return PruneEnd::top;
}

}  // namespace

AblationResult prune_and_evaluate(const std::map<std::string, double>& scores,
                                  const std::map<std::string, double>& ground_truth,
                                  PruneStrategy strategy, int k, const AblationOptions& options) {
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  Pruner pruner(scores, ground_truth, options);
  for (int step = 0; !options.max_steps || step < *options.max_steps; ++step)
    if (!pruner.apply(end_of(strategy), k)) break;
  return std::move(pruner).result();
}

AblationResult prune_sequence(const std::map<std::string, double>& scores,
                              const std::map<std::string, double>& ground_truth,
                              std::span<const PruneStep> plan, const AblationOptions& options) {
  Pruner pruner(scores, ground_truth, options);
  for (const auto& step : plan)
    if (!pruner.apply(step.end, step.k)) break;
  return std::move(pruner).result();
}

}  // namespace sitekit
