#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "sitekit/core.hpp"

namespace sitekit::synth {

// Gaussian-blob model zoo. Model m places its C class means on a regular
// simplex with pairwise distance separability[m] * noise_sigma and draws every
// frame as its class mean plus isotropic N(0, noise_sigma^2) noise.
struct SynthSpec {
  int n_models = 8;
  int classes = 5;
  int subsets = 3;
  int frames_per_subset = 600;
  int dim = 16;
  std::vector<double> separability;  // one entry per model
  double noise_sigma = 1.0;
  std::uint64_t seed = 0;

  // Throws std::invalid_argument when a field is out of range.
  void validate() const;
};

// Evenly spaced separabilities from `lo` to `hi` inclusive.
std::vector<double> linear_sweep(double lo, double hi, int count);

// Regular simplex vertices (rows) in `dim` dimensions with the given pairwise
// distance, centred at the origin. Requires dim >= classes - 1.
Matrix simplex_means(int classes, int dim, double distance);

// Model m draws from random::substream_seed(seed, m); frames are generated
// subset by subset, row by row, dimension by dimension. Frame n of a subset
// has label n mod C.
std::vector<CandidateModel> generate_suite(const SynthSpec& spec);

// Accuracy of a nearest-class-mean classifier fit on a random (1 - f) share of
// the model's pooled frames and tested on the remaining share f.
double pseudo_ground_truth(const CandidateModel& model, double holdout_fraction,
                           std::uint64_t seed);

// Sets ground_truth on every model, model i using substream_seed(seed, i).
void attach_pseudo_ground_truth(std::span<CandidateModel> models, double holdout_fraction,
                                std::uint64_t seed);

// Score-level pool: score_i = accuracy_i + score_noise * N(0,1).
struct ScorePool {
  std::map<std::string, double> scores;
  std::map<std::string, double> ground_truth;
};

ScorePool generate_score_pool(std::span<const double> accuracies, double score_noise,
                              std::uint64_t seed);

}  // namespace sitekit::synth
