#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sitekit/core.hpp"
#include "sitekit/npy.hpp"

namespace sitekit::io {

inline constexpr int kManifestSchemaVersion = 1;

// Optional metric parameter overrides carried by a manifest.
struct MetricDefaults {
  std::optional<double> transrate_eps;
  std::optional<double> logme_tol;
  std::optional<int> logme_max_iters;
  std::optional<double> pinv_rcond;
  std::optional<bool> standardize;

  // Overwrites the fields of `cfg` that are set here.
  void apply(MetricConfig& cfg) const;
};

struct SubsetEntry {
  std::string subset_id;
  std::string features_path;
  std::string labels_path;
};

struct ModelEntry {
  std::string name;
  std::vector<SubsetEntry> subsets;
  std::optional<double> ground_truth;
};

struct SuiteManifest {
  int schema_version = kManifestSchemaVersion;
  std::string dataset_name;
  std::optional<int> class_count;
  std::vector<ModelEntry> models;
  MetricDefaults defaults;
};

// A loaded and validated suite.
struct Suite {
  std::string dataset_name;
  int class_count = 0;
  std::vector<CandidateModel> models;
  MetricDefaults defaults;
  // Non-empty when the raw labels were renumbered; entry i is the raw label
  // of class i.
  std::vector<std::int64_t> label_alphabet;
};

class SuiteError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

SuiteManifest parse_manifest(const std::string& json_text);
SuiteManifest read_manifest(const std::filesystem::path& path);
std::string manifest_to_json(const SuiteManifest& manifest);

// Reads every referenced NPY file (paths relative to the manifest's
// directory), renumbers labels to a dense 0-based alphabet when needed, and
// runs validate_suite.
Suite load_suite(const std::filesystem::path& manifest_path);

struct ExportOptions {
  std::string dataset_name = "synthetic";
  std::optional<int> class_count;
  DType feature_dtype = DType::f8;
  DType label_dtype = DType::i8;
  MetricDefaults defaults;
};

// Writes <dir>/manifest.json plus <dir>/<model>/<subset>_{features,labels}.npy.
// Returns the manifest path.
std::filesystem::path export_suite(const std::vector<CandidateModel>& models,
                                   const std::filesystem::path& dir,
                                   const ExportOptions& options = {});

}  // namespace sitekit::io
