#include "sitekit/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>

#include "sitekit/random.hpp"

namespace sitekit::synth {

void SynthSpec::validate() const {
  if (n_models < 1 || subsets < 1 || frames_per_subset < 2 || dim < 1)
    throw std::invalid_argument("synth: counts must be >= 1 and frames_per_subset >= 2");
  if (classes < 2) throw std::invalid_argument("synth: need at least 2 classes");
  if (dim < classes - 1) throw std::invalid_argument("synth: dim must be >= classes - 1");
  if (separability.size() != static_cast<std::size_t>(n_models))
    throw std::invalid_argument("synth: need one separability per model");
  for (double s : separability)
    if (!(s >= 0.0) || !std::isfinite(s))
      throw std::invalid_argument("synth: separability must be finite and >= 0");
  if (!(noise_sigma > 0.0) || !std::isfinite(noise_sigma))
    throw std::invalid_argument("synth: noise sigma must be positive");
}

std::vector<double> linear_sweep(double lo, double hi, int count) {
  if (count < 1) throw std::invalid_argument("sweep count must be >= 1");
  std::vector<double> out(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i)
    out[static_cast<std::size_t>(i)] = count == 1 ? lo : lo + (hi - lo) * i / (count - 1);
  return out;
}

Matrix simplex_means(int classes, int dim, double distance) {
  if (dim < classes - 1) throw std::invalid_argument("simplex needs dim >= classes - 1");
  // Vertex c in the orthonormal Helmert basis of the sum-zero subspace of R^C:
  // h_k = (1, .., 1, -k, 0, ..) / sqrt(k (k + 1)), k = 1..C-1. The e_c are
  // sqrt(2) apart, hence the distance / sqrt(2) scale.
  Matrix means = Matrix::Zero(classes, dim);
  const double scale = distance / std::sqrt(2.0);
  for (int k = 1; k < classes; ++k) {
    const double norm = std::sqrt(static_cast<double>(k) * (k + 1));
    for (int c = 0; c < classes; ++c) {
      double h = 0.0;
      if (c < k)
        h = 1.0;
      else if (c == k)
        h = -static_cast<double>(k);
      means(c, k - 1) = scale * h / norm;
    }
  }
  return means;
}

namespace {

std::string numbered(const char* prefix, int i, int count) {
  const int width = count > 100 ? static_cast<int>(std::to_string(count - 1).size()) : 2;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_%0*d", prefix, width, i);
  return buf;
}

}  // namespace

std::vector<CandidateModel> generate_suite(const SynthSpec& spec) {
  spec.validate();
  std::vector<CandidateModel> suite;
  for (int m = 0; m < spec.n_models; ++m) {
    random::Stream rng(random::substream_seed(spec.seed, static_cast<std::uint64_t>(m)));
    const Matrix means = simplex_means(
        spec.classes, spec.dim, spec.separability[static_cast<std::size_t>(m)] * spec.noise_sigma);
    CandidateModel model;
    model.name = numbered("model", m, spec.n_models);
    for (int a = 0; a < spec.subsets; ++a) {
      EmbeddingSubset subset;
      subset.subset_id = numbered("subset", a, spec.subsets);
      subset.features.resize(spec.frames_per_subset, spec.dim);
      subset.labels.resize(static_cast<std::size_t>(spec.frames_per_subset));
      for (int n = 0; n < spec.frames_per_subset; ++n) {
        const int y = n % spec.classes;
        subset.labels[static_cast<std::size_t>(n)] = y;
        for (int j = 0; j < spec.dim; ++j)
          subset.features(n, j) = means(y, j) + spec.noise_sigma * rng.normal();
      }
      model.subsets.push_back(std::move(subset));
    }
    suite.push_back(std::move(model));
  }
  return suite;
}

double pseudo_ground_truth(const CandidateModel& model, double holdout_fraction,
                           std::uint64_t seed) {
  if (!(holdout_fraction > 0.0 && holdout_fraction < 1.0))
    throw std::invalid_argument("holdout fraction must lie in (0, 1)");
  if (model.subsets.empty()) throw std::invalid_argument("model has no subsets");

  const Eigen::Index d = model.subsets.front().features.cols();
  Eigen::Index total = 0;
  int classes = 0;
  for (const auto& s : model.subsets) {
    total += s.features.rows();
    for (int y : s.labels) classes = std::max(classes, y + 1);
  }
  Matrix x(total, d);
  std::vector<int> y(static_cast<std::size_t>(total));
  Eigen::Index row = 0;
  for (const auto& s : model.subsets) {
    x.middleRows(row, s.features.rows()) = s.features;
    std::copy(s.labels.begin(), s.labels.end(), y.begin() + row);
    row += s.features.rows();
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(total));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  random::Stream rng(seed);
  rng.shuffle(std::span(order));

  auto holdout = static_cast<Eigen::Index>(std::llround(holdout_fraction * static_cast<double>(total)));
  holdout = std::clamp<Eigen::Index>(holdout, 1, total - 1);

  Matrix means = Matrix::Zero(classes, d);
  std::vector<double> train_count(static_cast<std::size_t>(classes), 0.0);
  std::vector<int> test_count(static_cast<std::size_t>(classes), 0);
  for (Eigen::Index i = 0; i < total; ++i) {
    const Eigen::Index r = order[static_cast<std::size_t>(i)];
    const auto c = static_cast<std::size_t>(y[static_cast<std::size_t>(r)]);
    if (i < holdout) {
      ++test_count[c];
    } else {
      means.row(static_cast<Eigen::Index>(c)) += x.row(r);
      train_count[c] += 1.0;
    }
  }
  for (int c = 0; c < classes; ++c) {
    if (test_count[static_cast<std::size_t>(c)] == 0)
      throw std::invalid_argument("holdout has no samples of class " + std::to_string(c));
    if (train_count[static_cast<std::size_t>(c)] == 0.0)
      throw std::invalid_argument("training split has no samples of class " + std::to_string(c));
    means.row(c) /= train_count[static_cast<std::size_t>(c)];
  }

  Eigen::Index correct = 0;
  for (Eigen::Index i = 0; i < holdout; ++i) {
    const Eigen::Index r = order[static_cast<std::size_t>(i)];
    Eigen::Index best = 0;
    (means.rowwise() - x.row(r)).rowwise().squaredNorm().minCoeff(&best);
    if (best == y[static_cast<std::size_t>(r)]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(holdout);
}

void attach_pseudo_ground_truth(std::span<CandidateModel> models, double holdout_fraction,
                                std::uint64_t seed) {
  for (std::size_t i = 0; i < models.size(); ++i)
    models[i].ground_truth =
        pseudo_ground_truth(models[i], holdout_fraction, random::substream_seed(seed, i));
}

ScorePool generate_score_pool(std::span<const double> accuracies, double score_noise,
                              std::uint64_t seed) {
  random::Stream rng(seed);
  ScorePool pool;
  const int n = static_cast<int>(accuracies.size());
  for (int i = 0; i < n; ++i) {
    const std::string name = numbered("model", i, n);
    pool.ground_truth[name] = accuracies[static_cast<std::size_t>(i)];
    pool.scores[name] = accuracies[static_cast<std::size_t>(i)] + score_noise * rng.normal();
  }
  return pool;
}

}  // namespace sitekit::synth
