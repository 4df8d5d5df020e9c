#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sitekit/evaluate.hpp"

namespace sitekit {

enum class PruneStrategy { remove_top_k, remove_bottom_k, remove_both };
enum class PruneEnd { top, bottom, both };
// Which quantity decides "top" and "bottom".
enum class PruneSelection { ground_truth, score };

std::string_view to_string(PruneStrategy s);
PruneStrategy parse_prune_strategy(std::string_view s);
PruneSelection parse_prune_selection(std::string_view s);

struct PruneStep {
  PruneEnd end = PruneEnd::top;
  int k = 1;
};

// Parses "top:3,bottom:3" style plans.
std::vector<PruneStep> parse_prune_plan(std::string_view plan);

struct AblationOptions {
  PruneSelection selection = PruneSelection::ground_truth;
  // Cap on pruning steps for the repeating strategies; unlimited when unset.
  std::optional<int> max_steps;
  TauOptions tau;
};

struct AblationStep {
  int step = 0;                       // 0 is the full pool
  std::vector<std::string> removed;   // models dropped at this step
  std::vector<std::string> remaining; // survivors, by decreasing selection key
  double accuracy_range = 0.0;        // max - min ground truth of the survivors
  double weighted_tau = 0.0;
};

struct AblationResult {
  std::vector<AblationStep> steps;
  // True when a requested removal would have left fewer than 3 models.
  bool truncated = false;
};

inline constexpr std::size_t kMinAblationPool = 3;

// Repeats one removal (top k, bottom k, or k from both ends) cumulatively,
// recomputing tau_w on the survivors after each step. Ties in the selection
// key are broken by model name.
AblationResult prune_and_evaluate(const std::map<std::string, double>& scores,
                                  const std::map<std::string, double>& ground_truth,
                                  PruneStrategy strategy, int k,
                                  const AblationOptions& options = {});

// Applies an explicit cumulative removal plan, e.g. top 3 then bottom 3.
AblationResult prune_sequence(const std::map<std::string, double>& scores,
                              const std::map<std::string, double>& ground_truth,
                              std::span<const PruneStep> plan,
                              const AblationOptions& options = {});

}  // namespace sitekit
