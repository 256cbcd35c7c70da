#pragma once

#include <span>

namespace shock {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double max_abs_residual = 0.0;
  int n = 0;
};

/// Ordinary least squares y ~ intercept + slope * x.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

/// Zero of the least-squares line through the samples with lo <= y <= hi.
/// Returns NaN when fewer than two samples fall in the window or the fitted
/// slope is not negative.
double extrapolate_zero(std::span<const double> t, std::span<const double> y, double lo, double hi);

}  // namespace shock
