#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <string>

#include "shockform/errors.hpp"
#include "shockform/solver2d.hpp"

using namespace shock;

namespace {

// Amplitude of cos^3 on [0, 1] giving delta_star = 1/2 under the moving-medium
// law with a = 1 (tests/oracles/simple_wave.py).
constexpr double kAmplitude = 0.137832223855448;

Errc code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return Errc::ValidationError;
}

std::string message_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

DataSpec simple_wave(double amplitude) {
  DataSpec d;
  d.kind = "simple_wave";
  d.profile.kind = "sinpow";
  d.profile.power = 3;
  d.profile.amplitude = amplitude;
  return d;
}

/// Max over the grid of |psi - P(1 - x1 + t)| for the flat right-moving wave.
double flat_wave_error(int nx) {
  const MetricModel flat = MetricModel::quadratic(Mat3::Zero());
  DataSpec d;
  d.kind = "simple_wave";
  d.profile.kind = "bump";
  d.profile.amplitude = 0.1;
  const Grid2D g = make_grid(nx, 8, -0.05, 2.05, 0.5);
  State2D s = init_state(flat, d, g);
  const double t_end = 0.5;
  const int steps = static_cast<int>(std::ceil(t_end / (0.4 * g.dx)));
  const double dt = t_end / steps;
  for (int k = 0; k < steps; ++k) step(s, flat, g, dt);
  double err = 0.0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      err = std::max(err, std::abs(s.psi[g.idx(i, j)] - d.profile.value(1.0 - g.x1(i) + s.t)));
  return err;
}

}  // namespace

TEST_CASE("grid validation") {
  const Grid2D g = make_grid(64, 8, -0.05, 2.05, 0.5);
  CHECK(g.dx == doctest::Approx(2.1 / 63).epsilon(1e-15));
  CHECK(g.dy == 0.125);
  CHECK(g.x1(63) == doctest::Approx(2.05).epsilon(1e-15));
  CHECK(g.idx(3, 2) == 131u);

  CHECK(code_of([] { make_grid(8, 8, 0.0, 3.0, 0.5); }) == Errc::ValidationError);
  CHECK(code_of([] { make_grid(64, 4, 0.0, 3.0, 0.5); }) == Errc::ValidationError);
  CHECK(message_of([] { make_grid(64, 8, 0.0, 1.5, 0.5); }).find("x_max - x_min >= 1 + 2 t_max") !=
        std::string::npos);
  CHECK(code_of([] { make_grid(64, 8, 0.1, 3.0, 0.5); }) == Errc::ValidationError);
}

TEST_CASE("initial data") {
  const MetricModel m = moving_medium_model(1.0);
  const Grid2D g = make_grid(128, 8, -0.05, 2.05, 0.5);
  const State2D s = init_state(m, simple_wave(0.1), g);
  for (int i = 0; i < g.nx; ++i) {
    CHECK(s.u[g.idx(i, 3)] == doctest::Approx(1.0 - g.x1(i)).epsilon(1e-15));
    if (g.x1(i) < 0.0 || g.x1(i) > 1.0) CHECK(s.psi[g.idx(i, 0)] == 0.0);
  }
  DataSpec off = simple_wave(0.1);
  off.profile.center = 0.8;
  CHECK(code_of([&] { init_state(m, off, g); }) == Errc::SupportViolation);
}

TEST_CASE("trivial data stay trivial") {
  const MetricModel m = moving_medium_model(1.0);
  const Grid2D g = make_grid(64, 8, -0.05, 2.05, 0.5);
  SolverOptions o;
  o.t_max = 0.5;
  const RunResult r = run(m, DataSpec{}, g, o);
  CHECK(r.status == "t_max");
  CHECK(r.delta_star == 0.0);
  for (double v : r.final_state.psi) CHECK(v == 0.0);
  for (double v : r.final_state.mu) CHECK(v == doctest::Approx(1.0).epsilon(1e-13));
  for (const auto& row : r.series) CHECK(row.mu_star == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("amplitude solve matches the oracle") {
  const MetricModel m = moving_medium_model(1.0);
  DataSpec d = simple_wave(0.0);
  d.delta_target = 0.5;
  const DataSpec r = resolve_amplitude(m, d);
  CHECK(r.profile.amplitude == doctest::Approx(kAmplitude).epsilon(1e-6));
  CHECK(initial_delta_star(m, r) == doctest::Approx(0.5).epsilon(1e-9));
  // Without a target the spec is returned unchanged.
  CHECK(resolve_amplitude(m, simple_wave(0.07)).profile.amplitude == 0.07);
}

TEST_CASE("plane-symmetric data stay independent of x2") {
  const MetricModel m = moving_medium_model(1.0);
  const Grid2D g = make_grid(256, 8, -0.05, 2.05, 0.5);
  State2D s = init_state(m, simple_wave(kAmplitude), g);
  const double dt = cfl_time_step(s, m, g, 0.4);
  CHECK(dt > 0.0);
  CHECK(dt <= 0.4 * g.dx);
  for (int k = 0; k < 20; ++k) step(s, m, g, dt, 0.05);
  double spread = 0.0;
  for (int i = 0; i < g.nx; ++i)
    for (int j = 1; j < g.ny; ++j) {
      spread = std::max(spread, std::abs(s.psi[g.idx(i, j)] - s.psi[g.idx(i, 0)]));
      spread = std::max(spread, std::abs(s.mu[g.idx(i, j)] - s.mu[g.idx(i, 0)]));
    }
  CHECK(spread <= 1e-12);
}

TEST_CASE("flat background: converges to the right-moving exact wave") {
  const double e1 = flat_wave_error(421);
  const double e2 = flat_wave_error(841);
  CHECK(e2 < 1e-6);
  CHECK(e1 / e2 >= 10.0);
}

TEST_CASE("simple wave: mu_star follows 1 - delta t before the shock") {
  const MetricModel m = moving_medium_model(1.0);
  DataSpec d = simple_wave(0.0);
  d.delta_target = 0.5;
  const Grid2D g = make_grid(1024, 8, -0.05, 3.05, 1.0);
  SolverOptions o;
  o.t_max = 1.0;
  o.trace = false;
  const RunResult r = run(m, d, g, o);
  CHECK(r.status == "t_max");
  CHECK(r.delta_star == doctest::Approx(0.5).epsilon(1e-6));
  REQUIRE(r.series.size() > 10);
  for (const auto& row : r.series) CHECK(std::abs(row.mu_star - (1.0 - 0.5 * row.t)) <= 5e-3);
  CHECK(r.series.back().t == doctest::Approx(1.0).epsilon(1e-12));
  // Rows are in time order and the shock indicator never increases much.
  for (std::size_t k = 1; k < r.series.size(); ++k) {
    CHECK(r.series[k].t > r.series[k - 1].t);
    CHECK(r.series[k].mu_star <= r.series[k - 1].mu_star + 1e-6);
  }
}
