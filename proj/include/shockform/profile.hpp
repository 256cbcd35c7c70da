#pragma once

#include <array>
#include <string>

namespace shock {

/// C-infinity bump exp(1 - 1/(1 - y^2)) on |y| < 1 and its first three derivatives.
std::array<double, 4> bump(double y);
/// max |B'| over y.
double bump_max_slope();

/// One-dimensional wave profile supported on [center - width, center + width].
///
/// "bump" is amplitude * B(y); "sinpow" is amplitude * cos(pi y / 2)^power,
/// with y = (s - center) / width.
struct Profile {
  std::string kind = "bump";
  double amplitude = 0.0;
  double center = 0.5;
  double width = 0.5;
  int power = 4;

  /// Value and first two derivatives at s.
  std::array<double, 3> eval(double s) const;
  double value(double s) const { return eval(s)[0]; }
  double derivative(double s) const { return eval(s)[1]; }
  /// max |P'| for unit amplitude.
  double unit_max_slope() const;
};

/// ValidationError unless kind is known, width > 0 and power >= 3.
void validate_profile(const Profile& p);

}  // namespace shock
