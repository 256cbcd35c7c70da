#pragma once

#include <functional>
#include <vector>

#include "shockform/euler.hpp"
#include "shockform/model.hpp"
#include "shockform/profile.hpp"

namespace shock {

/// Plane simple wave psi = profile(u) with u = 1 - x1 on the initial slice.
struct SimpleWaveData {
  Profile profile;
  int n_u = 4096;  // equispaced samples on [0, 1]
};

/// Fan of straight characteristics of a simple wave, sampled in u.
struct CharacteristicFan {
  std::vector<double> u, x0, slope, mu0, coeff;
  std::vector<double> X1;     // X^1(u), constant along each characteristic
  std::vector<double> dpsi;   // profile'(u) = Xbreve psi
  /// Exact (mu0, coeff) at any u, when the fan was built from a profile.
  std::function<std::array<double, 2>(double)> point;
};

CharacteristicFan simple_wave_fan(const MetricModel& model, const SimpleWaveData& data);

/// mu(t, u) = mu0(u) + t * coeff(u), with linear interpolation in u.
double simple_wave_mu(const CharacteristicFan& fan, double t, double u);

struct BlowupPrediction {
  double T = 0.0;
  double u = 0.0;
};
/// First crossing time min over u of -mu0 / coeff. NoShockPredicted when
/// coeff >= 0 everywhere.
BlowupPrediction simple_wave_blowup_time(const CharacteristicFan& fan);

/// Half the largest negative part of 2 * coeff, i.e. of G_LL * Xbreve psi.
double fan_delta_star(const CharacteristicFan& fan);

struct PlaneSample {
  double t = 0.0;
  double mu_star = 1.0;
  double max_abs_dxpsi = 0.0;
};
/// mu_star(t) and max |d_x psi| on the fan at n_t times in [0, t_end].
std::vector<PlaneSample> simple_wave_series(const CharacteristicFan& fan, double t_end, int n_t);

// ---------------------------------------------------------------------------
// Plane-symmetric Euler evolution by characteristic tracing.

struct RiemannOptions {
  double x_min = -0.25;
  double x_max = 2.0;
  int n = 2048;
  double t_max = 10.0;
  double mu_stop = 0.05;
  double cfl = 0.4;
  int n_markers = 257;  // L-characteristics seeded on the support of the data
  /// Exact d R+/dx of the initial data; cubic differentiation of the grid data if empty.
  std::function<double(double)> dRplus_dx;
};

struct RiemannSample {
  double t = 0.0;
  double mu_star = 1.0;
  double max_abs_dxpsi = 0.0;  // max |d_x Psi1'| along the markers
  double drift = 0.0;          // max |R+(grid at marker) - R+(marker)|
  double max_abs_rminus = 0.0;
};

struct RiemannResult {
  std::vector<double> x;
  std::vector<double> Rminus, Rplus;  // final state
  std::vector<RiemannSample> series;
  std::vector<double> marker_u, marker_x, marker_mu, marker_mu_geo;  // final marker data
  bool shocked = false;
  double t_end = 0.0;
  double t_lifespan = 0.0;  // tail extrapolation of mu_star to zero
  double drift_rate = 0.0;  // drift per unit time, window mu_star >= 0.5
  double max_abs_rminus = 0.0;
  double transport_geo_gap = 0.0;  // max |mu_marker - mu_geo| while mu_star >= 0.2
};

/// Advances R- along Lbar and R+ along L by backtracing with cubic
/// interpolation. Markers follow L and integrate the system mu transport.
RiemannResult riemann_solve(const FluidModel& fm_rescaled, const std::vector<double>& Rminus0,
                            const std::vector<double>& Rplus0, const RiemannOptions& opt);

/// Exact d R+/dx for hierarchy data.
std::function<double(double)> hierarchy_slope(const HierarchyData& data);

/// Exact first-crossing time for data with R- = 0 and R+ = eps0 B((x - c)/w).
BlowupPrediction euler_blowup_time(const FluidModel& fm_rescaled, const HierarchyData& data);

}  // namespace shock
