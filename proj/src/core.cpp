#include "sitekit/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

namespace sitekit {

std::string_view to_string(Metric m) {
  switch (m) {
    case Metric::logme: return "logme";
    case Metric::hscore: return "hscore";
    case Metric::transrate: return "transrate";
  }
  return "?";
}

std::string_view to_string(Aggregation a) {
  switch (a) {
    case Aggregation::mean: return "mean";
    case Aggregation::min: return "min";
    case Aggregation::max: return "max";
  }
  return "?";
}

std::string_view display_name(Metric m) {
  switch (m) {
    case Metric::logme: return "LogME";
    case Metric::hscore: return "Hscore";
    case Metric::transrate: return "TransRate";
  }
  return "?";
}

Metric parse_metric(std::string_view s) {
  for (Metric m : kAllMetrics)
    if (to_string(m) == s) return m;
  throw std::invalid_argument("unknown metric '" + std::string(s) + "'");
}

Aggregation parse_aggregation(std::string_view s) {
  for (Aggregation a : kAllAggregations)
    if (to_string(a) == s) return a;
  throw std::invalid_argument("unknown aggregation '" + std::string(s) + "'");
}

void MetricConfig::validate() const {
  if (!(transrate_eps > 0.0) || !std::isfinite(transrate_eps))
    throw std::invalid_argument("transrate_eps must be positive");
  if (!(logme_tol > 0.0)) throw std::invalid_argument("logme_tol must be positive");
  if (logme_max_iters < 1) throw std::invalid_argument("logme_max_iters must be >= 1");
  if (pinv_rcond && !(*pinv_rcond > 0.0))
    throw std::invalid_argument("pinv_rcond must be positive");
}

std::vector<double> ScoreTable::raw_scores(std::string_view model, Metric metric) const {
  std::vector<double> out;
  for (const auto& r : rows)
    if (r.model == model && r.metric == metric) out.push_back(r.score);
  return out;
}

std::optional<double> ScoreTable::global_score(std::string_view model, Metric metric,
                                               Aggregation aggregation) const {
  for (const auto& a : aggregated)
    if (a.model == model && a.metric == metric && a.aggregation == aggregation) return a.score;
  return std::nullopt;
}

std::vector<std::string> ScoreTable::models() const {
  std::vector<std::string> out;
  auto add = [&](const std::string& name) {
    if (std::find(out.begin(), out.end(), name) == out.end()) out.push_back(name);
  };
  for (const auto& r : rows) add(r.model);
  for (const auto& a : aggregated) add(a.model);
  return out;
}

bool ValidationReport::ok() const {
  return std::all_of(models.begin(), models.end(), [](const auto& m) { return m.ok; });
}

std::string ValidationReport::summary() const {
  std::ostringstream os;
  for (const auto& m : models)
    for (const auto& r : m.reasons) os << m.model << ": " << r << '\n';
  return os.str();
}

namespace {

// Per-model checks; returns the model's own class count (max label + 1).
int check_model(const CandidateModel& model, std::optional<int> declared, ModelValidation& out) {
  auto fail = [&](std::string reason) {
    out.ok = false;
    out.reasons.push_back(std::move(reason));
  };

  if (model.name.empty()) fail("empty model name");
  if (model.subsets.empty()) fail("model has no subsets (Z >= 1 violated)");
  if (model.ground_truth &&
      (!std::isfinite(*model.ground_truth) || *model.ground_truth < 0.0 || *model.ground_truth > 1.0))
    fail("ground truth outside [0,1]");

  std::set<std::string> ids;
  std::optional<std::size_t> dim;
  int max_label = -1;
  for (const auto& s : model.subsets) {
    const std::string where = "subset '" + s.subset_id + "': ";
    if (!ids.insert(s.subset_id).second) fail(where + "duplicate subset id");
    if (s.frames() < 2) fail(where + "N ≥ 2 violated");
    if (s.dim() < 1) fail(where + "d ≥ 1 violated");
    if (!s.features.allFinite()) fail(where + "non-finite feature values");
    if (s.labels.size() != s.frames())
      fail(where + "label count " + std::to_string(s.labels.size()) + " does not match " +
           std::to_string(s.frames()) + " feature rows");
    if (dim && *dim != s.dim()) fail(where + "embedding dimension mismatch within model");
    if (!dim) dim = s.dim();
    for (int y : s.labels) {
      if (y < 0 || (declared && y >= *declared)) {
        fail(where + "label " + std::to_string(y) + " out of range");
        break;
      }
      max_label = std::max(max_label, y);
    }
  }
  return max_label + 1;
}

}  // namespace

ValidationReport validate_suite(std::span<const CandidateModel> models,
                                std::optional<int> class_count) {
  if (models.empty()) throw std::invalid_argument("empty suite");

  ValidationReport report;
  std::vector<int> per_model(models.size());
  std::set<std::string> names;
  for (std::size_t i = 0; i < models.size(); ++i) {
    ModelValidation mv;
    mv.model = models[i].name;
    per_model[i] = check_model(models[i], class_count, mv);
    if (!names.insert(models[i].name).second) {
      mv.ok = false;
      mv.reasons.push_back("duplicate model name");
    }
    report.models.push_back(std::move(mv));
  }

  // Every model sees the same target data, hence the same class alphabet.
  const int inferred_c = *std::max_element(per_model.begin(), per_model.end());
  const int suite_c = class_count.value_or(inferred_c);
  report.class_count = suite_c;
  for (std::size_t i = 0; i < models.size(); ++i) {
    if (per_model[i] != inferred_c) {
      report.models[i].ok = false;
      report.models[i].reasons.push_back("class count mismatch: model has C=" +
                                         std::to_string(per_model[i]) + ", suite has C=" +
                                         std::to_string(inferred_c));
    }
  }
  if (suite_c < 2)
    for (auto& mv : report.models) {
      mv.ok = false;
      mv.reasons.push_back("fewer than 2 classes in suite");
    }
  return report;
}

LabelEncoder LabelEncoder::fit(std::span<const std::vector<std::int64_t>> batches,
                               std::optional<int> declared_classes) {
  std::set<std::int64_t> seen;
  for (const auto& b : batches) seen.insert(b.begin(), b.end());

  LabelEncoder enc;
  if (seen.empty()) {
    enc.class_count_ = declared_classes.value_or(0);
    return enc;
  }
  const std::int64_t lo = *seen.begin();
  const std::int64_t hi = *seen.rbegin();
  const bool dense = lo >= 0 && (declared_classes ? hi < *declared_classes
                                                  : hi + 1 == static_cast<std::int64_t>(seen.size()));
  if (dense) {
    enc.class_count_ = declared_classes.value_or(static_cast<int>(hi + 1));
    return enc;
  }
  enc.identity_ = false;
  enc.alphabet_.assign(seen.begin(), seen.end());
  enc.class_count_ = static_cast<int>(enc.alphabet_.size());
  if (declared_classes && enc.class_count_ > *declared_classes)
    throw std::invalid_argument("label alphabet has " + std::to_string(enc.class_count_) +
                                " values but class_count is " +
                                std::to_string(*declared_classes));
  if (declared_classes) enc.class_count_ = *declared_classes;
  return enc;
}

Labels LabelEncoder::transform(std::span<const std::int64_t> raw) const {
  Labels out(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (identity_) {
      if (raw[i] < 0 || raw[i] > std::numeric_limits<int>::max())
        throw std::invalid_argument("label " + std::to_string(raw[i]) + " out of range");
      out[i] = static_cast<int>(raw[i]);
      continue;
    }
    auto it = std::lower_bound(alphabet_.begin(), alphabet_.end(), raw[i]);
    if (it == alphabet_.end() || *it != raw[i])
      throw std::invalid_argument("label " + std::to_string(raw[i]) + " not in fitted alphabet");
    out[i] = static_cast<int>(it - alphabet_.begin());
  }
  return out;
}

}  // namespace sitekit
