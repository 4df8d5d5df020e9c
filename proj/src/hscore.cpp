#include <cmath>
#include <limits>

#include "metric_common.hpp"
#include "sitekit/metrics.hpp"

namespace sitekit::metrics {

double hscore(const Matrix& features, std::span<const int> labels, const MetricConfig& cfg) {
  detail::check_inputs(features, labels, "hscore");
  cfg.validate();
  const auto canon = detail::canonicalize(features, labels);
  const Matrix& f = canon.features;
  const double n = static_cast<double>(f.rows());
  const Eigen::Index d = f.cols();

  const Eigen::RowVectorXd mu = f.colwise().mean();
  const Matrix centred = f.rowwise() - mu;
  const Matrix cov_f = centred.transpose() * centred / n;

  const auto classes = present_classes(canon.labels);
  Matrix cov_g = Matrix::Zero(d, d);
  for (int c : classes) {
    Eigen::RowVectorXd sum = Eigen::RowVectorXd::Zero(d);
    double count = 0.0;
    for (Eigen::Index i = 0; i < f.rows(); ++i) {
      if (canon.labels[static_cast<std::size_t>(i)] != c) continue;
      sum += centred.row(i);
      count += 1.0;
    }
    const Vector delta = (sum / count).transpose();
    cov_g.noalias() += (count / n) * delta * delta.transpose();
  }

  Eigen::SelfAdjointEigenSolver<Matrix> eig(cov_f);
  if (eig.info() != Eigen::Success) throw std::runtime_error("hscore: eigendecomposition failed");
  const Vector& lambda = eig.eigenvalues();
  const Matrix& v = eig.eigenvectors();
  const double rcond =
      cfg.pinv_rcond.value_or(static_cast<double>(d) * std::numeric_limits<double>::epsilon());
  const double cutoff = rcond * lambda.cwiseAbs().maxCoeff();

  double h = 0.0;
  for (Eigen::Index i = 0; i < d; ++i) {
    if (!(std::abs(lambda(i)) > cutoff)) continue;
    h += v.col(i).dot(cov_g * v.col(i)) / lambda(i);
  }
  return h;
}

}  // namespace sitekit::metrics
