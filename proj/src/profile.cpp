#include "shockform/profile.hpp"

#include <cmath>
#include <numbers>

#include "shockform/errors.hpp"

namespace shock {

std::array<double, 4> bump(double y) {
  if (!(std::abs(y) < 1.0)) return {0.0, 0.0, 0.0, 0.0};
  const double q = 1.0 / (1.0 - y * y);
  const double B = std::exp(1.0 - q);
  const double q1 = 2.0 * y * q * q;
  const double q2 = 2.0 * q * q + 4.0 * y * q * q1;
  const double q3 = 8.0 * q * q1 + 4.0 * y * (q1 * q1 + q * q2);
  return {B, -q1 * B, (q1 * q1 - q2) * B, (-q1 * q1 * q1 + 3.0 * q1 * q2 - q3) * B};
}

namespace {

template <class F>
double golden_max(F f, double a, double b) {
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - gr * (b - a), d = a + gr * (b - a);
  for (int i = 0; i < 200; ++i) {
    if (f(c) > f(d))
      b = d;
    else
      a = c;
    c = b - gr * (b - a);
    d = a + gr * (b - a);
  }
  return f(0.5 * (a + b));
}

}  // namespace

double bump_max_slope() {
  static const double value = golden_max([](double y) { return std::abs(bump(y)[1]); }, 0.05, 0.99);
  return value;
}

std::array<double, 3> Profile::eval(double s) const {
  const double y = (s - center) / width;
  if (!(std::abs(y) < 1.0)) return {0.0, 0.0, 0.0};
  if (kind == "bump") {
    const auto b = bump(y);
    return {amplitude * b[0], amplitude * b[1] / width, amplitude * b[2] / (width * width)};
  }
  // cos^p(k y) with k = pi/2
  const double k = 0.5 * std::numbers::pi;
  const double c = std::cos(k * y), sn = std::sin(k * y);
  const double p = power;
  const double v = std::pow(c, p);
  const double d1 = -p * k * std::pow(c, p - 1) * sn;
  const double d2 = p * k * k * ((p - 1) * std::pow(c, p - 2) * sn * sn - std::pow(c, p));
  return {amplitude * v, amplitude * d1 / width, amplitude * d2 / (width * width)};
}

double Profile::unit_max_slope() const {
  if (kind == "bump") return bump_max_slope() / width;
  Profile unit = *this;
  unit.amplitude = 1.0;
  return golden_max([&](double s) { return std::abs(unit.derivative(s)); }, center, center + width);
}

void validate_profile(const Profile& p) {
  if (p.kind != "bump" && p.kind != "sinpow")
    throw Error(Errc::ValidationError, "data.profile: unknown kind '" + p.kind + "'");
  if (!(p.width > 0.0)) throw Error(Errc::ValidationError, "data.width: must be positive");
  if (p.kind == "sinpow" && p.power < 3)
    throw Error(Errc::ValidationError, "data.power: must be at least 3");
}

}  // namespace shock
