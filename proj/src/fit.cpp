#include "shockform/fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace shock {

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  LineFit f;
  const std::size_t n = std::min(x.size(), y.size());
  f.n = static_cast<int>(n);
  if (n == 0) return f;
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  f.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  f.intercept = my - f.slope * mx;
  for (std::size_t i = 0; i < n; ++i)
    f.max_abs_residual = std::max(f.max_abs_residual, std::abs(y[i] - f.intercept - f.slope * x[i]));
  return f;
}

double extrapolate_zero(std::span<const double> t, std::span<const double> y, double lo, double hi) {
  std::vector<double> tt, yy;
  for (std::size_t i = 0; i < std::min(t.size(), y.size()); ++i) {
    if (y[i] >= lo && y[i] <= hi) {
      tt.push_back(t[i]);
      yy.push_back(y[i]);
    }
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (tt.size() < 2) return nan;
  const LineFit f = fit_line(tt, yy);
  if (!(f.slope < 0.0)) return nan;
  return -f.intercept / f.slope;
}

}  // namespace shock
