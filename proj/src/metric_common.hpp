#pragma once

#include <algorithm>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sitekit/core.hpp"

namespace sitekit::metrics::detail {

inline void check_inputs(const Matrix& features, std::span<const int> labels, const char* metric) {
  const std::string who(metric);
  if (static_cast<std::size_t>(features.rows()) != labels.size())
    throw std::invalid_argument(who + ": " + std::to_string(labels.size()) + " labels for " +
                                std::to_string(features.rows()) + " feature rows");
  if (features.rows() < 2) throw std::invalid_argument(who + ": need at least 2 frames");
  if (features.cols() < 1) throw std::invalid_argument(who + ": need at least 1 feature dimension");
  if (!features.allFinite()) throw std::invalid_argument(who + ": non-finite feature values");
  if (std::any_of(labels.begin(), labels.end(), [](int y) { return y < 0; }))
    throw std::invalid_argument(who + ": negative label");
  if (std::adjacent_find(labels.begin(), labels.end(), std::not_equal_to<>()) == labels.end())
    throw std::invalid_argument(who + ": need at least 2 distinct classes");
}

// Rows sorted lexicographically by (features, label). Every sum over rows then
// runs in an order that does not depend on the caller's row order.
struct Canonical {
  Matrix features;
  std::vector<int> labels;
};

inline Canonical canonicalize(const Matrix& features, std::span<const int> labels) {
  const Eigen::Index n = features.rows();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    for (Eigen::Index j = 0; j < features.cols(); ++j) {
      if (features(a, j) < features(b, j)) return true;
      if (features(b, j) < features(a, j)) return false;
    }
    return labels[static_cast<std::size_t>(a)] < labels[static_cast<std::size_t>(b)];
  });
  Canonical out{Matrix(n, features.cols()), std::vector<int>(static_cast<std::size_t>(n))};
  for (Eigen::Index i = 0; i < n; ++i) {
    out.features.row(i) = features.row(order[static_cast<std::size_t>(i)]);
    out.labels[static_cast<std::size_t>(i)] = labels[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])];
  }
  return out;
}

}  // namespace sitekit::metrics::detail
