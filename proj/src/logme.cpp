#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "metric_common.hpp"
#include "sitekit/metrics.hpp"

namespace sitekit::metrics {

namespace {

// alpha and beta are kept inside [kFloor, kCap]; a vanishing denominator in
// either update (exact fit, zero features) sends the precision to the cap.
constexpr double kCap = 1e12;
constexpr double kFloor = 1e-12;
constexpr double kTiny = 1e-300;

double clamp_precision(double numerator, double denominator) {
  if (!(denominator > kTiny)) return kCap;
  const double v = numerator / denominator;
  if (!std::isfinite(v)) return kCap;
  return std::clamp(v, kFloor, kCap);
}

}  // namespace

LogmeSpectrum::LogmeSpectrum(const Matrix& features) : dim_(features.cols()) {
  Eigen::BDCSVD<Matrix> svd(features, Eigen::ComputeThinU);
  u_ = svd.matrixU();
  sigma_ = svd.singularValues().array().square();
}

LogmeSpectrum::Projection LogmeSpectrum::project(const Vector& y) const {
  Projection p;
  p.z = u_.transpose() * y;
  p.outside = (y - u_ * p.z).squaredNorm();
  return p;
}

double LogmeSpectrum::evidence_at(const Projection& p, double alpha, double beta, double* gamma,
                                  double* mtm, double* residual) const {
  const double n = static_cast<double>(u_.rows());
  const Eigen::Index k = sigma_.size();
  double g = 0.0, m2 = 0.0, res = p.outside, logdet = 0.0;
  for (Eigen::Index i = 0; i < k; ++i) {
    const double s = sigma_(i);
    const double denom = alpha + beta * s;
    const double z = p.z(i);
    g += beta * s / denom;
    m2 += beta * beta * s * z * z / (denom * denom);
    const double r = alpha * z / denom;
    res += r * r;
    logdet += std::log(denom);
  }
  // Directions outside the row space of F contribute ln(alpha) each.
  logdet += static_cast<double>(dim_ - k) * std::log(alpha);
  if (gamma) *gamma = g;
  if (mtm) *mtm = m2;
  if (residual) *residual = res;
  return 0.5 * static_cast<double>(dim_) * std::log(alpha) + 0.5 * n * std::log(beta) -
         0.5 * n * std::log(2.0 * std::numbers::pi) - 0.5 * beta * res - 0.5 * alpha * m2 -
         0.5 * logdet;
}

double LogmeSpectrum::log_evidence(const Vector& y, double alpha, double beta) const {
  return evidence_at(project(y), alpha, beta, nullptr, nullptr, nullptr);
}

LogmeState LogmeSpectrum::maximize(const Vector& y, double tol, int max_iters) const {
  const double n = static_cast<double>(u_.rows());
  const Projection p = project(y);

  LogmeState cur;
  double gamma = 0.0, mtm = 0.0, res = 0.0;
  cur.evidence = evidence_at(p, cur.alpha, cur.beta, &gamma, &mtm, &res);
  LogmeState best = cur;

  for (int it = 1; it <= max_iters; ++it) {
    LogmeState next;
    next.alpha = clamp_precision(gamma, mtm);
    next.beta = clamp_precision(n - gamma, res);
    next.iterations = it;
    next.evidence = evidence_at(p, next.alpha, next.beta, &gamma, &mtm, &res);
    best.iterations = it;

    if (next.evidence < best.evidence - 1e-9 * n) break;
    if (next.evidence > best.evidence) best = next;
    if (std::abs(next.evidence - cur.evidence) / n < tol) break;
    cur = next;
  }
  return best;
}

std::vector<LogmeState> logme_states(const Matrix& features, std::span<const int> labels,
                                     const MetricConfig& cfg) {
  detail::check_inputs(features, labels, "logme");
  cfg.validate();
  const auto canon = detail::canonicalize(features, labels);
  const LogmeSpectrum spectrum(canon.features);

  std::vector<LogmeState> states;
  for (int c : present_classes(canon.labels)) {
    Vector y(canon.features.rows());
    for (Eigen::Index i = 0; i < y.size(); ++i)
      y(i) = canon.labels[static_cast<std::size_t>(i)] == c ? 1.0 : 0.0;
    states.push_back(spectrum.maximize(y, cfg.logme_tol, cfg.logme_max_iters));
  }
  return states;
}

double logme(const Matrix& features, std::span<const int> labels, const MetricConfig& cfg) {
  const auto states = logme_states(features, labels, cfg);
  const double n = static_cast<double>(features.rows());
  double sum = 0.0;
  for (const auto& s : states) sum += s.evidence / n;
  return sum / static_cast<double>(states.size());
}

double score(const Matrix& features, std::span<const int> labels, const MetricConfig& cfg) {
  if (cfg.standardize) {
    if (!features.allFinite()) throw std::invalid_argument("non-finite feature values");
    MetricConfig raw = cfg;
    raw.standardize = false;
    return score(standardize(features), labels, raw);
  }
  switch (cfg.metric) {
    case Metric::logme: return logme(features, labels, cfg);
    case Metric::hscore: return hscore(features, labels, cfg);
    case Metric::transrate: return transrate(features, labels, cfg);
  }
  throw std::invalid_argument("unknown metric");
}

std::string variant_note(Metric metric, const MetricConfig& cfg) {
  std::ostringstream os;
  os.precision(17);
  switch (metric) {
    case Metric::logme:
      os << "one-vs-rest one-hot targets averaged over classes present in the subset; "
            "fixed-point evidence maximisation from alpha=beta=1; tol="
         << cfg.logme_tol << " per sample; max_iters=" << cfg.logme_max_iters;
      break;
    case Metric::hscore:
      os << "trace(pinv(Sigma_f) Sigma_g) with population (1/N) covariances; pinv rcond=";
      if (cfg.pinv_rcond)
        os << *cfg.pinv_rcond;
      else
        os << "d*machine_epsilon";
      break;
    case Metric::transrate:
      os << "global centring; R(Z,eps)=0.5*logdet(I+Z^T Z/(n*eps)); uniform 1/C class "
            "average; eps="
         << cfg.transrate_eps;
      break;
  }
  if (cfg.standardize) os << "; features standardized per dimension";
  return os.str();
}

}  // namespace sitekit::metrics
