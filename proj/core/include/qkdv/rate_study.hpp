#pragma once

#include <string>
#include <vector>

namespace qkdv {

// Norms measured along a geometric parameter sequence, with a least squares
// fit of log(norm) against log(parameter).
struct RateStudy {
  std::string parameter;  // "eps", "kappa", "Xi", "xi", "m"
  std::string norm_id;
  std::vector<double> values;
  std::vector<double> norms;
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // RMS of the natural-log fit residuals

  // Slopes between consecutive points.
  std::vector<double> local_slopes() const;
  double min_local_slope() const;
  double max_local_slope() const;
};

// Needs at least 4 points, all positive and finite; otherwise
// InsufficientDataError. The slope must come out finite.
RateStudy fit_rate(std::string parameter, std::string norm_id, std::vector<double> values,
                   std::vector<double> norms);

// Throws InconclusiveRateError when study.residual > max_residual.
void require_conclusive(const RateStudy& study, double max_residual, const std::string& advice);

// value0 * ratio^k for k = 0..count-1.
std::vector<double> geometric_sequence(double value0, double ratio, std::size_t count);

}  // namespace qkdv
