#include "muskat/stats.hpp"

#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <stdexcept>

namespace muskat {

LinearFit least_squares(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("least_squares: size mismatch");
  LinearFit fit;
  const size_t n = x.size();
  fit.points = static_cast<int>(n);
  if (n < 2) {
    fit.degenerate = true;
    fit.reason = "fewer than two points";
    return fit;
  }
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) {
    fit.degenerate = true;
    fit.reason = "all abscissae coincide";
    return fit;
  }
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.slope_low = fit.slope_high = fit.slope;
  if (n > 2) {
    double ss = 0.0;
    for (size_t i = 0; i < n; ++i) {
      const double r = y[i] - fit.intercept - fit.slope * x[i];
      ss += r * r;
    }
    const double dof = static_cast<double>(n - 2);
    fit.slope_stderr = std::sqrt(ss / dof / sxx);
    const boost::math::students_t dist(dof);
    const double q = boost::math::quantile(boost::math::complement(dist, 0.025));
    fit.slope_low = fit.slope - q * fit.slope_stderr;
    fit.slope_high = fit.slope + q * fit.slope_stderr;
  }
  return fit;
}

LinearFit fit_rate(const std::vector<std::pair<double, double>>& pairs) {
  LinearFit fit;
  fit.points = static_cast<int>(pairs.size());
  if (pairs.size() < 3) {
    fit.degenerate = true;
    fit.reason = "fewer than 3 points";
    return fit;
  }
  std::vector<double> lx, ly;
  for (const auto& [s, d] : pairs) {
    if (!(s > 0.0) || !(d > 0.0) || !std::isfinite(s) || !std::isfinite(d)) {
      fit.degenerate = true;
      fit.reason = "nonpositive or non-finite value";
      return fit;
    }
    lx.push_back(std::log(s));
    ly.push_back(std::log(d));
  }
  return least_squares(lx, ly);
}

}  // namespace muskat
