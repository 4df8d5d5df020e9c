#include "metric_common.hpp"
#include "sitekit/metrics.hpp"

namespace sitekit::metrics {

double coding_rate(const Matrix& z, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("coding_rate: eps must be positive");
  const Eigen::Index n = z.rows();
  if (n == 0) throw std::invalid_argument("coding_rate: empty matrix");
  const double scale = 1.0 / (static_cast<double>(n) * eps);
  // det(I_d + s Z^T Z) = det(I_n + s Z Z^T); factor the smaller side.
  if (n < z.cols()) {
    Matrix gram = scale * (z * z.transpose());
    gram.diagonal().array() += 1.0;
    return 0.5 * logdet_spd(gram);
  }
  Matrix gram = scale * (z.transpose() * z);
  gram.diagonal().array() += 1.0;
  return 0.5 * logdet_spd(gram);
}

double transrate(const Matrix& features, std::span<const int> labels, const MetricConfig& cfg) {
  detail::check_inputs(features, labels, "transrate");
  cfg.validate();
  const auto canon = detail::canonicalize(features, labels);
  const Matrix z = canon.features.rowwise() - canon.features.colwise().mean();

  // Classes are those present in the subset, renumbered densely.
  const auto classes = present_classes(canon.labels);
  std::vector<int> dense(canon.labels.size());
  for (std::size_t i = 0; i < dense.size(); ++i)
    dense[i] = static_cast<int>(std::lower_bound(classes.begin(), classes.end(), canon.labels[i]) -
                                classes.begin());
  const auto parts = partition_by_class(dense, static_cast<int>(classes.size()));

  const double whole = coding_rate(z, cfg.transrate_eps);
  double conditional = 0.0;
  for (const auto& rows : parts) conditional += coding_rate(z(rows, Eigen::all), cfg.transrate_eps);
  return whole - conditional / static_cast<double>(parts.size());
}

}  // namespace sitekit::metrics
