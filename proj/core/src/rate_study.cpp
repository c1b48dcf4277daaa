#include "qkdv/rate_study.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "qkdv/error.hpp"

namespace qkdv {

RateStudy fit_rate(std::string parameter, std::string norm_id, std::vector<double> values,
                   std::vector<double> norms) {
  if (values.size() != norms.size()) throw DimensionError("rate study needs one norm per parameter value");
  if (values.size() < 4) throw InsufficientDataError("rate study needs at least 4 parameter values");
  const auto m = static_cast<Eigen::Index>(values.size());
  Eigen::MatrixXd X(m, 2);
  Eigen::VectorXd y(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double v = values[static_cast<std::size_t>(i)], n = norms[static_cast<std::size_t>(i)];
    if (!(v > 0.0) || !(n > 0.0) || !std::isfinite(v) || !std::isfinite(n))
      throw InsufficientDataError(norm_id + ": rate study needs positive finite values and norms");
    X(i, 0) = std::log(v);
    X(i, 1) = 1.0;
    y[i] = std::log(n);
  }
  const Eigen::Vector2d beta = X.colPivHouseholderQr().solve(y);
  if (!std::isfinite(beta[0])) throw InconclusiveRateError(norm_id + ": fitted slope is not finite");
  RateStudy r;
  r.parameter = std::move(parameter);
  r.norm_id = std::move(norm_id);
  r.values = std::move(values);
  r.norms = std::move(norms);
  r.slope = beta[0];
  r.intercept = beta[1];
  r.residual = std::sqrt((X * beta - y).squaredNorm() / static_cast<double>(m));
  return r;
}

std::vector<double> RateStudy::local_slopes() const {
  std::vector<double> out;
  for (std::size_t i = 1; i < values.size(); ++i)
    out.push_back(std::log(norms[i] / norms[i - 1]) / std::log(values[i] / values[i - 1]));
  return out;
}

double RateStudy::min_local_slope() const {
  const auto s = local_slopes();
  return s.empty() ? std::numeric_limits<double>::quiet_NaN() : *std::min_element(s.begin(), s.end());
}

double RateStudy::max_local_slope() const {
  const auto s = local_slopes();
  return s.empty() ? std::numeric_limits<double>::quiet_NaN() : *std::max_element(s.begin(), s.end());
}

void require_conclusive(const RateStudy& study, double max_residual, const std::string& advice) {
  if (study.residual > max_residual)
    throw InconclusiveRateError(study.norm_id + ": fit residual " + std::to_string(study.residual) + " exceeds " +
                                std::to_string(max_residual) + "; " + advice);
}

std::vector<double> geometric_sequence(double value0, double ratio, std::size_t count) {
  std::vector<double> out(count);
  double v = value0;
  for (auto& o : out) {
    o = v;
    v *= ratio;
  }
  return out;
}

}  // namespace qkdv
