#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "shockform/diagnostics.hpp"
#include "shockform/errors.hpp"
#include "shockform/plane.hpp"

using namespace shock;

namespace {

// Amplitude of cos^3 on [0, 1] giving delta_star = 1/2 under the moving-medium
// law with a = 1, and the location of the sup (tests/oracles/simple_wave.py).
constexpr double kAmplitude = 0.137832223855448;
constexpr double kUStar = 0.695913275997772;

Profile sinpow3(double amplitude) {
  Profile p;
  p.kind = "sinpow";
  p.power = 3;
  p.center = 0.5;
  p.width = 0.5;
  p.amplitude = amplitude;
  return p;
}

MetricModel affine_A11() {
  Mat3 A = Mat3::Zero();
  A(1, 1) = 1.0;
  return normalize_time_component(MetricModel::quadratic(A));
}

}  // namespace

TEST_CASE("fan of the trivial wave") {
  SimpleWaveData d{sinpow3(0.0), 257};
  const CharacteristicFan fan = simple_wave_fan(affine_A11(), d);
  for (std::size_t k = 0; k < fan.u.size(); ++k) {
    CHECK(fan.slope[k] == 1.0);
    CHECK(fan.mu0[k] == 1.0);
    CHECK(fan.coeff[k] == 0.0);
  }
  CHECK_THROWS_AS(simple_wave_blowup_time(fan), Error);
}

TEST_CASE("fan under g11 = 1 + psi matches the closed-form frame") {
  // For this law: slope = (1+psi)^(-1/2), mu0 = (1+psi)^(1/2),
  // coefficient = P'(u) / (2 (1 + psi)).
  const Profile p = sinpow3(0.1);
  SimpleWaveData d{p, 513};
  const CharacteristicFan fan = simple_wave_fan(affine_A11(), d);
  for (std::size_t k = 0; k < fan.u.size(); k += 16) {
    const auto e = p.eval(fan.u[k]);
    CHECK(fan.slope[k] == doctest::Approx(1.0 / std::sqrt(1.0 + e[0])).epsilon(1e-13));
    CHECK(fan.mu0[k] == doctest::Approx(std::sqrt(1.0 + e[0])).epsilon(1e-13));
    CHECK(fan.coeff[k] == doctest::Approx(0.5 * e[1] / (1.0 + e[0])).epsilon(1e-12));
  }
  // The profile peak at u = 1/2 has P' = 0.
  CHECK(std::abs(fan.coeff[256]) < 1e-15);
}

TEST_CASE("mu along the fan is affine in t") {
  const Profile p = sinpow3(0.1);
  const CharacteristicFan fan = simple_wave_fan(affine_A11(), SimpleWaveData{p, 513});
  for (double u : {0.3, 0.5, 0.8}) CHECK(simple_wave_mu(fan, 0.0, u) == doctest::Approx(fan.point(u)[0]));
  CharacteristicFan f = fan;
  std::fill(f.mu0.begin(), f.mu0.end(), 1.0);
  std::fill(f.coeff.begin(), f.coeff.end(), -0.25);
  CHECK(simple_wave_mu(f, 2.0, 0.37) == doctest::Approx(0.5).epsilon(1e-15));
  std::fill(f.coeff.begin(), f.coeff.end(), 0.0);
  CHECK(simple_wave_mu(f, 7.0, 0.37) == 1.0);
}

TEST_CASE("blowup time of the reference wave") {
  const MetricModel m = moving_medium_model(1.0);
  const CharacteristicFan fan = simple_wave_fan(m, SimpleWaveData{sinpow3(kAmplitude), 4096});
  for (double mu0 : fan.mu0) CHECK(mu0 == doctest::Approx(1.0).epsilon(1e-14));
  const BlowupPrediction bp = simple_wave_blowup_time(fan);
  CHECK(bp.T == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(bp.u == doctest::Approx(kUStar).epsilon(1e-6));
  // delta_star is a sup over the 4096 samples while T is refined between
  // them, so they agree to the sampling error only.
  const double d = fan_delta_star(fan);
  CHECK(d <= 0.5 + 1e-12);
  CHECK(d == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(bp.T * d == doctest::Approx(1.0).epsilon(1e-6));

  CHECK_THROWS_AS(simple_wave_fan(MetricModel::quadratic(Mat3::Zero()), SimpleWaveData{sinpow3(0.1), 64}), Error);
}

TEST_CASE("characteristics cross first at the predicted time") {
  const MetricModel m = moving_medium_model(1.0);
  const CharacteristicFan fan = simple_wave_fan(m, SimpleWaveData{sinpow3(kAmplitude), 20001});
  const double T = simple_wave_blowup_time(fan).T;
  auto ordered = [&](double t) {
    // u = 1 - x1 on the initial slice, so x1 decreases with u.
    for (std::size_t k = 1; k < fan.u.size(); ++k)
      if (fan.x0[k] + fan.slope[k] * t >= fan.x0[k - 1] + fan.slope[k - 1] * t) return false;
    return true;
  };
  CHECK(ordered(0.0));
  CHECK(ordered(T * (1.0 - 1e-4)));
  CHECK_FALSE(ordered(T * (1.0 + 1e-4)));
}

TEST_CASE("fan series: linear vanishing of mu_star") {
  const MetricModel m = moving_medium_model(1.0);
  const CharacteristicFan fan = simple_wave_fan(m, SimpleWaveData{sinpow3(kAmplitude), 4096});
  const double T = simple_wave_blowup_time(fan).T;
  const auto series = simple_wave_series(fan, T, 256);
  REQUIRE(series.size() == 256);
  CHECK(series.front().mu_star == doctest::Approx(1.0));
  std::vector<double> t, mu;
  for (const auto& s : series) {
    t.push_back(s.t);
    mu.push_back(s.mu_star);
  }
  const MuFit fit = fit_mu_star(t, mu);
  REQUIRE(fit.ok);
  CHECK(fit.residual <= 1e-10);
  CHECK(fit.kappa == doctest::Approx(fan_delta_star(fan)).epsilon(1e-10));
  // max |d_x psi| grows without bound on approach.
  CHECK(series.back().max_abs_dxpsi > 20.0 * series.front().max_abs_dxpsi);
}
