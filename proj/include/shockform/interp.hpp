#pragma once

#include <array>
#include <cmath>

namespace shock {

/// Weights of the 4-point Lagrange interpolant on nodes -1, 0, 1, 2 at
/// fractional offset s in [0, 1), and of its derivative.
inline std::array<double, 4> cubic_weights(double s) {
  return {-s * (s - 1.0) * (s - 2.0) / 6.0, (s + 1.0) * (s - 1.0) * (s - 2.0) / 2.0,
          -(s + 1.0) * s * (s - 2.0) / 2.0, (s + 1.0) * s * (s - 1.0) / 6.0};
}

inline std::array<double, 4> cubic_dweights(double s) {
  return {-(3.0 * s * s - 6.0 * s + 2.0) / 6.0, (3.0 * s * s - 4.0 * s - 1.0) / 2.0,
          -(3.0 * s * s - 2.0 * s - 2.0) / 2.0, (3.0 * s * s - 1.0) / 6.0};
}

/// Value and x-derivative of the cubic interpolant of f on a uniform grid
/// x_i = x0 + i h, i in [0, n). Indices outside the grid clamp to the ends.
template <class Array>
std::array<double, 2> cubic_interp(const Array& f, int n, double x0, double h, double x) {
  const double r = (x - x0) / h;
  int i = static_cast<int>(std::floor(r));
  i = std::max(1, std::min(n - 3, i));
  const double s = r - i;
  const auto w = cubic_weights(s), dw = cubic_dweights(s);
  double v = 0.0, d = 0.0;
  for (int k = 0; k < 4; ++k) {
    const int j = std::max(0, std::min(n - 1, i - 1 + k));
    v += w[k] * f[j];
    d += dw[k] * f[j];
  }
  return {v, d / h};
}

}  // namespace shock
