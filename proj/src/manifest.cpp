#include "sitekit/manifest.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace sitekit::io {

using nlohmann::json;

void MetricDefaults::apply(MetricConfig& cfg) const {
  if (transrate_eps) cfg.transrate_eps = *transrate_eps;
  if (logme_tol) cfg.logme_tol = *logme_tol;
  if (logme_max_iters) cfg.logme_max_iters = *logme_max_iters;
  if (pinv_rcond) cfg.pinv_rcond = *pinv_rcond;
  if (standardize) cfg.standardize = *standardize;
}

namespace {

[[noreturn]] void schema_error(const std::string& what) {
  throw SuiteError("manifest schema violation: " + what);
}

template <typename T>
T required(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) schema_error(where + "missing '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    schema_error(where + "'" + key + "' has the wrong type");
  }
}

template <typename T>
std::optional<T> optional_field(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    schema_error(where + "'" + key + "' has the wrong type");
  }
}

}  // namespace

SuiteManifest parse_manifest(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw SuiteError(std::string("manifest is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) schema_error("top level must be an object");

  SuiteManifest m;
  m.schema_version = required<int>(j, "schema_version", "");
  if (m.schema_version != kManifestSchemaVersion)
    schema_error("schema_version must be " + std::to_string(kManifestSchemaVersion));
  m.dataset_name = optional_field<std::string>(j, "dataset_name", "").value_or("");
  m.class_count = optional_field<int>(j, "class_count", "");
  if (m.class_count && *m.class_count < 2) schema_error("class_count must be >= 2");

  if (!j.contains("models") || !j["models"].is_array()) schema_error("'models' must be an array");
  std::set<std::string> names;
  for (const auto& jm : j["models"]) {
    ModelEntry e;
    e.name = required<std::string>(jm, "name", "model: ");
    const std::string where = "model '" + e.name + "': ";
    if (!names.insert(e.name).second) schema_error(where + "duplicate model name");
    e.ground_truth = optional_field<double>(jm, "ground_truth", where);
    if (!jm.contains("subsets") || !jm["subsets"].is_array())
      schema_error(where + "'subsets' must be an array");
    for (const auto& js : jm["subsets"]) {
      SubsetEntry s;
      s.subset_id = required<std::string>(js, "subset_id", where);
      s.features_path = required<std::string>(js, "features_path", where);
      s.labels_path = required<std::string>(js, "labels_path", where);
      e.subsets.push_back(std::move(s));
    }
    m.models.push_back(std::move(e));
  }

  if (j.contains("defaults") && !j["defaults"].is_null()) {
    const auto& d = j["defaults"];
    if (!d.is_object()) schema_error("'defaults' must be an object");
    m.defaults.transrate_eps = optional_field<double>(d, "transrate_eps", "defaults: ");
    m.defaults.logme_tol = optional_field<double>(d, "logme_tol", "defaults: ");
    m.defaults.logme_max_iters = optional_field<int>(d, "logme_max_iters", "defaults: ");
    m.defaults.pinv_rcond = optional_field<double>(d, "pinv_rcond", "defaults: ");
    m.defaults.standardize = optional_field<bool>(d, "standardize", "defaults: ");
  }
  return m;
}

SuiteManifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SuiteError("cannot open manifest " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_manifest(ss.str());
}

std::string manifest_to_json(const SuiteManifest& m) {
  json j;
  j["schema_version"] = m.schema_version;
  j["dataset_name"] = m.dataset_name;
  if (m.class_count) j["class_count"] = *m.class_count;
  j["models"] = json::array();
  for (const auto& e : m.models) {
    json jm;
    jm["name"] = e.name;
    if (e.ground_truth) jm["ground_truth"] = *e.ground_truth;
    jm["subsets"] = json::array();
    for (const auto& s : e.subsets)
      jm["subsets"].push_back(
          {{"subset_id", s.subset_id}, {"features_path", s.features_path}, {"labels_path", s.labels_path}});
    j["models"].push_back(std::move(jm));
  }
  json d = json::object();
  if (m.defaults.transrate_eps) d["transrate_eps"] = *m.defaults.transrate_eps;
  if (m.defaults.logme_tol) d["logme_tol"] = *m.defaults.logme_tol;
  if (m.defaults.logme_max_iters) d["logme_max_iters"] = *m.defaults.logme_max_iters;
  if (m.defaults.pinv_rcond) d["pinv_rcond"] = *m.defaults.pinv_rcond;
  if (m.defaults.standardize) d["standardize"] = *m.defaults.standardize;
  if (!d.empty()) j["defaults"] = std::move(d);
  return j.dump(2) + "\n";
}

Suite load_suite(const std::filesystem::path& manifest_path) {
  const SuiteManifest manifest = read_manifest(manifest_path);
  const auto base = manifest_path.parent_path();
  if (manifest.models.empty()) throw SuiteError("empty suite");

  Suite suite;
  suite.dataset_name = manifest.dataset_name;
  suite.defaults = manifest.defaults;

  // Labels are read first so one encoder covers the whole suite.
  std::vector<std::vector<std::int64_t>> raw_labels;
  for (const auto& e : manifest.models) {
    CandidateModel model;
    model.name = e.name;
    model.ground_truth = e.ground_truth;
    for (const auto& s : e.subsets) {
      const std::string where = "model '" + e.name + "', subset '" + s.subset_id + "': ";
      EmbeddingSubset subset;
      subset.subset_id = s.subset_id;
      try {
        subset.features = read_matrix(base / s.features_path);
        raw_labels.push_back(read_labels(base / s.labels_path));
      } catch (const std::exception& ex) {
        throw SuiteError(where + ex.what());
      }
      if (static_cast<Eigen::Index>(raw_labels.back().size()) != subset.features.rows())
        throw SuiteError(where + "row mismatch: " + std::to_string(raw_labels.back().size()) +
                         " labels vs " + std::to_string(subset.features.rows()) + " feature rows");
      model.subsets.push_back(std::move(subset));
    }
    suite.models.push_back(std::move(model));
  }

  LabelEncoder encoder;
  try {
    encoder = LabelEncoder::fit(raw_labels, manifest.class_count);
  } catch (const std::exception& ex) {
    throw SuiteError(ex.what());
  }
  std::size_t k = 0;
  for (auto& model : suite.models)
    for (auto& subset : model.subsets) subset.labels = encoder.transform(raw_labels[k++]);
  suite.label_alphabet = encoder.alphabet();

  const auto report =
      validate_suite(suite.models, manifest.class_count ? std::optional<int>(encoder.class_count())
                                                        : std::nullopt);
  if (!report.ok()) throw SuiteError("suite validation failed:\n" + report.summary());
  suite.class_count = report.class_count;
  return suite;
}

std::filesystem::path export_suite(const std::vector<CandidateModel>& models,
                                   const std::filesystem::path& dir, const ExportOptions& options) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  SuiteManifest m;
  m.dataset_name = options.dataset_name;
  m.class_count = options.class_count;
  m.defaults = options.defaults;
  for (const auto& model : models) {
    ModelEntry e;
    e.name = model.name;
    e.ground_truth = model.ground_truth;
    fs::create_directories(dir / model.name);
    for (const auto& s : model.subsets) {
      SubsetEntry se;
      se.subset_id = s.subset_id;
      se.features_path = (fs::path(model.name) / (s.subset_id + "_features.npy")).generic_string();
      se.labels_path = (fs::path(model.name) / (s.subset_id + "_labels.npy")).generic_string();
      write_matrix(dir / se.features_path, s.features, options.feature_dtype);
      const std::vector<std::int64_t> labels(s.labels.begin(), s.labels.end());
      write_labels(dir / se.labels_path, labels, options.label_dtype);
      e.subsets.push_back(std::move(se));
    }
    m.models.push_back(std::move(e));
  }
  const auto path = dir / "manifest.json";
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw SuiteError("cannot write " + path.string());
  out << manifest_to_json(m);
  return path;
}

}  // namespace sitekit::io
