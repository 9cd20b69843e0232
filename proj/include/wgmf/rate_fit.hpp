#pragma once

#include <vector>

namespace wgmf {

/// Least-squares line through (log x, log y).
struct RateFit {
  std::vector<double> xs;
  std::vector<double> ys;
  double slope = 0.0;
  double intercept = 0.0;     // in log space: log y ≈ intercept + slope · log x
  double r_squared = 0.0;
  double slope_stderr = 0.0;
};

/// Throws std::invalid_argument for fewer than three points, mismatched
/// lengths, nonpositive values, or a degenerate x set.
RateFit fit_rate(const std::vector<double>& xs, const std::vector<double>& ys);

}  // namespace wgmf
