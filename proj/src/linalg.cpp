#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "sitekit/metrics.hpp"

namespace sitekit::metrics {

std::vector<std::vector<Eigen::Index>> partition_by_class(std::span<const int> labels,
                                                          int class_count) {
  std::vector<std::vector<Eigen::Index>> parts(static_cast<std::size_t>(class_count));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int y = labels[i];
    if (y < 0 || y >= class_count)
      throw std::invalid_argument("label " + std::to_string(y) + " outside [0, " +
                                  std::to_string(class_count) + ")");
    parts[static_cast<std::size_t>(y)].push_back(static_cast<Eigen::Index>(i));
  }
  for (int c = 0; c < class_count; ++c)
    if (parts[static_cast<std::size_t>(c)].empty())
      throw std::invalid_argument("class " + std::to_string(c) + " has no rows");
  return parts;
}

std::vector<int> present_classes(std::span<const int> labels) {
  std::set<int> s(labels.begin(), labels.end());
  return {s.begin(), s.end()};
}

Matrix standardize(const Matrix& features) {
  const Eigen::Index n = features.rows();
  Matrix out = features.rowwise() - features.colwise().mean();
  for (Eigen::Index j = 0; j < out.cols(); ++j) {
    const double sd = std::sqrt(out.col(j).squaredNorm() / static_cast<double>(n));
    if (sd > 0.0) out.col(j) /= sd;
  }
  return out;
}

double logdet_spd(const Matrix& a) {
  Eigen::LLT<Matrix> llt(a);
  if (llt.info() != Eigen::Success) throw std::runtime_error("matrix is not positive definite");
  const Matrix& l = llt.matrixLLT();
  double sum = 0.0;
  for (Eigen::Index i = 0; i < l.rows(); ++i) sum += std::log(l(i, i));
  return 2.0 * sum;
}

}  // namespace sitekit::metrics
