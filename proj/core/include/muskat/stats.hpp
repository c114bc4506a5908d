#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

namespace muskat {

/// Ordinary least squares y = intercept + slope * x with a two-sided 95%
/// Student-t interval on the slope.
struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_low = 0.0;
  double slope_high = 0.0;
  double slope_stderr = 0.0;
  int points = 0;
  bool degenerate = false;
  std::string reason;
};

LinearFit least_squares(std::span<const double> x, std::span<const double> y);

/// Fit of log(diff) against log(s). Fewer than 3 pairs or any nonpositive
/// value gives a degenerate fit carrying the reason.
LinearFit fit_rate(const std::vector<std::pair<double, double>>& pairs);

}  // namespace muskat
