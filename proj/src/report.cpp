#include "sitekit/report.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace sitekit::io {

using nlohmann::json;

ReportFormat parse_report_format(std::string_view s) {
  if (s == "json") return ReportFormat::json;
  if (s == "csv") return ReportFormat::csv;
  throw std::invalid_argument("unknown report format '" + std::string(s) + "'");
}

namespace {

std::string exact(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fixed3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

json to_json(const RankingEvaluation& e) {
  return {{"pearson_r", e.pearson_r},
          {"kendall_tau", e.kendall_tau},
          {"weighted_tau", e.weighted_tau},
          {"n_models", e.n_models}};
}

}  // namespace

std::string row_label(Metric metric, Aggregation aggregation) {
  return std::string(display_name(metric)) + " (" + std::string(to_string(aggregation)) + ")";
}

std::string render_correlation_csv(const std::vector<EvaluationRecord>& evals, TableTau tau) {
  std::vector<std::string> datasets;
  for (const auto& e : evals)
    if (std::find(datasets.begin(), datasets.end(), e.dataset) == datasets.end())
      datasets.push_back(e.dataset);

  std::string out = "Metric";
  for (const auto& d : datasets) out += ", " + d + " (r), " + d + " (tau)";
  out += "\n";
  for (Metric m : kAllMetrics)
    for (Aggregation a : kAllAggregations) {
      std::vector<const EvaluationRecord*> row(datasets.size(), nullptr);
      bool any = false;
      for (const auto& e : evals) {
        if (e.metric != m || e.aggregation != a) continue;
        const auto pos = std::find(datasets.begin(), datasets.end(), e.dataset) - datasets.begin();
        row[static_cast<std::size_t>(pos)] = &e;
        any = true;
      }
      if (!any) continue;
      out += row_label(m, a);
      for (const auto* e : row) {
        if (!e) {
          out += ", , ";
          continue;
        }
        const double t =
            tau == TableTau::weighted ? e->evaluation.weighted_tau : e->evaluation.kendall_tau;
        out += ", " + fixed3(e->evaluation.pearson_r) + ", " + fixed3(t);
      }
      out += "\n";
    }
  return out;
}

std::string render_scatter_csv(const ScoreTable& table,
                               const std::map<std::string, double>& ground_truth) {
  std::string out = "model,metric,aggregation,global_score,ground_truth\n";
  for (const auto& a : table.aggregated) {
    const auto it = ground_truth.find(a.model);
    if (it == ground_truth.end()) continue;
    out += a.model + "," + std::string(to_string(a.metric)) + "," +
           std::string(to_string(a.aggregation)) + "," + exact(a.score) + "," + exact(it->second) +
           "\n";
  }
  return out;
}

std::string render_scores_csv(const ScoreTable& table) {
  std::string out = "model,metric,subset,score\n";
  for (const auto& r : table.rows)
    out += r.model + "," + std::string(to_string(r.metric)) + "," + r.subset_id + "," +
           exact(r.score) + "\n";
  return out;
}

std::string render_aggregated_csv(const ScoreTable& table) {
  std::string out = "model,metric,aggregation,score\n";
  for (const auto& a : table.aggregated)
    out += a.model + "," + std::string(to_string(a.metric)) + "," +
           std::string(to_string(a.aggregation)) + "," + exact(a.score) + "\n";
  return out;
}

std::string render_ablation_csv(const AblationResult& result) {
  std::string out = "step,removed,n_remaining,accuracy_range,weighted_tau\n";
  for (const auto& s : result.steps) {
    std::string removed;
    for (std::size_t i = 0; i < s.removed.size(); ++i) removed += (i ? ";" : "") + s.removed[i];
    out += std::to_string(s.step) + "," + removed + "," + std::to_string(s.remaining.size()) +
           "," + exact(s.accuracy_range) + "," + exact(s.weighted_tau) + "\n";
  }
  return out;
}

std::string render_bundle(const ScoreTable& table, const std::vector<EvaluationRecord>& evals,
                          const Provenance& provenance) {
  json j;
  j["schema_version"] = 1;
  j["provenance"] = {{"tool", provenance.tool},
                     {"generated_at", provenance.generated_at},
                     {"config", provenance.config},
                     {"metric_variants", provenance.metric_variants}};
  j["scores"] = json::array();
  for (const auto& r : table.rows)
    j["scores"].push_back({{"model", r.model},
                           {"metric", to_string(r.metric)},
                           {"subset", r.subset_id},
                           {"score", r.score}});
  j["aggregated"] = json::array();
  for (const auto& a : table.aggregated)
    j["aggregated"].push_back({{"model", a.model},
                               {"metric", to_string(a.metric)},
                               {"aggregation", to_string(a.aggregation)},
                               {"score", a.score}});
  j["evaluations"] = json::array();
  for (const auto& e : evals)
    j["evaluations"].push_back({{"dataset", e.dataset},
                                {"metric", to_string(e.metric)},
                                {"aggregation", to_string(e.aggregation)},
                                {"evaluation", to_json(e.evaluation)}});
  return j.dump(2) + "\n";
}

Bundle parse_bundle(const std::string& json_text) {
  const json j = json::parse(json_text);
  Bundle b;
  const auto& p = j.at("provenance");
  b.provenance.tool = p.at("tool").get<std::string>();
  b.provenance.generated_at = p.at("generated_at").get<std::string>();
  b.provenance.config = p.at("config").get<std::map<std::string, std::string>>();
  b.provenance.metric_variants = p.at("metric_variants").get<std::map<std::string, std::string>>();
  for (const auto& r : j.at("scores"))
    b.table.rows.push_back({r.at("model").get<std::string>(),
                            parse_metric(r.at("metric").get<std::string>()),
                            r.at("subset").get<std::string>(), r.at("score").get<double>()});
  for (const auto& a : j.at("aggregated"))
    b.table.aggregated.push_back({a.at("model").get<std::string>(),
                                  parse_metric(a.at("metric").get<std::string>()),
                                  parse_aggregation(a.at("aggregation").get<std::string>()),
                                  a.at("score").get<double>()});
  for (const auto& e : j.at("evaluations")) {
    EvaluationRecord rec;
    rec.dataset = e.at("dataset").get<std::string>();
    rec.metric = parse_metric(e.at("metric").get<std::string>());
    rec.aggregation = parse_aggregation(e.at("aggregation").get<std::string>());
    const auto& ev = e.at("evaluation");
    rec.evaluation.pearson_r = ev.at("pearson_r").get<double>();
    rec.evaluation.kendall_tau = ev.at("kendall_tau").get<double>();
    rec.evaluation.weighted_tau = ev.at("weighted_tau").get<double>();
    rec.evaluation.n_models = ev.at("n_models").get<int>();
    b.evals.push_back(std::move(rec));
  }
  return b;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

namespace {

std::vector<std::filesystem::path> write_all(const ScoreTable& table,
                                             const std::vector<EvaluationRecord>& evals,
                                             const ReportOptions& options) {
  if (table.rows.empty() && table.aggregated.empty())
    throw std::invalid_argument("report: empty score table");
  std::filesystem::create_directories(options.out_dir);
  std::vector<std::filesystem::path> written;
  auto emit = [&](const char* name, const std::string& text) {
    const auto path = options.out_dir / name;
    write_text(path, text);
    written.push_back(path);
  };

  if (options.format == ReportFormat::csv) {
    emit("scores.csv", render_scores_csv(table));
    emit("aggregated.csv", render_aggregated_csv(table));
    if (!evals.empty()) emit("correlations.csv", render_correlation_csv(evals, options.table_tau));
    if (!options.ground_truth.empty())
      emit("scatter.csv", render_scatter_csv(table, options.ground_truth));
  }
  Provenance prov = options.provenance;
  if (prov.generated_at.empty()) prov.generated_at = utc_timestamp();
  emit("report.json", render_bundle(table, evals, prov));
  return written;
}

}  // namespace

std::vector<std::filesystem::path> write_scores(const ScoreTable& table,
                                                const ReportOptions& options) {
  return write_all(table, {}, options);
}

std::vector<std::filesystem::path> write_report(const ScoreTable& table,
                                                const std::vector<EvaluationRecord>& evals,
                                                const ReportOptions& options) {
  if (evals.empty()) throw std::invalid_argument("report: no evaluations to write");
  return write_all(table, evals, options);
}

}  // namespace sitekit::io
