#pragma once

#include <span>
#include <string>
#include <vector>

#include "sitekit/core.hpp"

namespace sitekit::metrics {

// Internal state of one LogME evidence maximisation (one one-vs-rest target).
struct LogmeState {
  double alpha = 1.0;  // prior precision
  double beta = 1.0;   // noise precision
  double evidence = 0.0;  // log marginal likelihood, not normalised by N
  int iterations = 0;
};

// Spectral decomposition of the feature matrix shared by all LogME targets.
class LogmeSpectrum {
 public:
  explicit LogmeSpectrum(const Matrix& features);

  // Evidence of one-hot target `y` maximised over (alpha, beta).
  LogmeState maximize(const Vector& y, double tol, int max_iters) const;

  // Closed-form log evidence L(alpha, beta) for target `y`.
  double log_evidence(const Vector& y, double alpha, double beta) const;

  Eigen::Index frames() const { return u_.rows(); }
  Eigen::Index dim() const { return dim_; }

 private:
  struct Projection {
    Vector z;             // U^T y
    double outside = 0.0; // ||y - U U^T y||^2
  };
  Projection project(const Vector& y) const;
  double evidence_at(const Projection& p, double alpha, double beta, double* gamma,
                     double* mtm, double* residual) const;

  Matrix u_;       // thin left singular vectors, N x k
  Vector sigma_;   // squared singular values, length k
  Eigen::Index dim_ = 0;
};

// Mean over present classes of the per-sample maximum LogME evidence.
double logme(const Matrix& features, std::span<const int> labels, const MetricConfig& cfg);

// Per-class states behind `logme`, in ascending class order.
std::vector<LogmeState> logme_states(const Matrix& features, std::span<const int> labels,
                                     const MetricConfig& cfg);

// trace(pinv(Sigma_f) * Sigma_g) with population covariances.
double hscore(const Matrix& features, std::span<const int> labels, const MetricConfig& cfg);

// R(Z, eps) - mean_c R(Z_c, eps) on globally centred features.
double transrate(const Matrix& features, std::span<const int> labels, const MetricConfig& cfg);

// Coding rate 0.5 * logdet(I + Z^T Z / (n * eps)), n = rows of Z.
double coding_rate(const Matrix& z, double eps);

// Dispatches on cfg.metric, applying cfg.standardize first.
double score(const Matrix& features, std::span<const int> labels, const MetricConfig& cfg);

// Short disclosure string describing the implemented variant of a metric.
std::string variant_note(Metric metric, const MetricConfig& cfg);

// Row indices grouped by class id for classes 0..class_count-1. Throws when
// a class has no rows.
std::vector<std::vector<Eigen::Index>> partition_by_class(std::span<const int> labels,
                                                          int class_count);

// Sorted distinct labels.
std::vector<int> present_classes(std::span<const int> labels);

// Per-column z-scoring; zero-variance columns are only centred.
Matrix standardize(const Matrix& features);

// log det of a symmetric positive definite matrix via Cholesky.
double logdet_spd(const Matrix& a);

}  // namespace sitekit::metrics
