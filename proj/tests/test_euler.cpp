#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "shockform/errors.hpp"
#include "shockform/euler.hpp"
#include "shockform/plane.hpp"

using namespace shock;

namespace {

FluidModel rescaled(double s, double k = 1.0) { return rescale_coordinates(make_fluid_model(power_lagrangian(s), k)); }

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> x(n);
  for (int i = 0; i < n; ++i) x[i] = a + (b - a) * i / (n - 1);
  return x;
}

RiemannResult evolve(const FluidModel& fm, const HierarchyData& d, double x_min, double x_max, int n,
                     double t_max) {
  RiemannOptions o;
  o.x_min = x_min;
  o.x_max = x_max;
  o.n = n;
  o.t_max = t_max;
  o.dRplus_dx = hierarchy_slope(d);
  return riemann_solve(fm, d.Rminus, d.Rplus, o);
}

}  // namespace

TEST_CASE("sigma of the potential gradient") {
  const double k = 1.3;
  CHECK(sigma(Vec3(k, 0, 0), minkowski()) == doctest::Approx(k * k).epsilon(1e-15));
  CHECK(sigma(Vec3(k, 0.1, 0), minkowski()) == doctest::Approx(k * k - 0.01).epsilon(1e-15));
  const FluidModel fm = rescaled(1.0, k);
  Mat3 m = minkowski();
  m(0, 0) = -1.0 / (fm.cbar * fm.cbar);
  CHECK(sigma(Vec3(fm.kprime(), 0, 0), m) == doctest::Approx(k * k).epsilon(1e-14));
  CHECK_THROWS_AS(sigma(Vec3(0.1, 1.0, 0), minkowski()), Error);
}

TEST_CASE("sound speed of the power-law Lagrangian") {
  for (double s : {0.5, 1.0, 1.5, 2.0}) {
    const FluidModel fm = make_fluid_model(power_lagrangian(s), 1.0);
    const double want = 1.0 / std::sqrt(1.0 + 2.0 * s);
    for (int i = 0; i <= 50; ++i) {
      const double sg = fm.sigma_lo + (fm.sigma_hi - fm.sigma_lo) * i / 50.0;
      CHECK(std::abs(sound_speed(fm, sg) - want) <= 1e-12);
      CHECK(fluid_F(fm.lag, sg) == doctest::Approx(2.0 * s / sg).epsilon(1e-14));
      // Rescaled coordinates give unit sound speed.
      CHECK(std::abs(sound_speed(rescale_coordinates(fm), sg) - 1.0) <= 1e-12);
    }
  }
  CHECK(sound_speed(make_fluid_model(power_lagrangian(1.5), 1.0), 1.0) == doctest::Approx(0.5).epsilon(1e-15));
  // L = sigma: F = 0 and c_s = 1.
  CHECK(sound_speed(make_fluid_model(power_lagrangian(0.0), 1.0), 2.0) == 1.0);
}

TEST_CASE("acoustical metric") {
  for (double s : {0.5, 1.0, 2.0}) {
    const double k = 1.0;
    const FluidModel fm = make_fluid_model(power_lagrangian(s), k);
    const AcousticalPair p = acoustical_metric(fm, Vec3(k, 0, 0));
    CHECK(p.g(0, 0) == doctest::Approx(-1.0 / (1.0 + 2.0 * s)).epsilon(1e-14));
  }
  const FluidModel lin = make_fluid_model(power_lagrangian(0.0), 1.0);
  CHECK((acoustical_metric(lin, Vec3(1.0, 0.2, -0.1)).g - minkowski()).cwiseAbs().maxCoeff() == 0.0);

  std::mt19937 rng(5);
  std::uniform_real_distribution<double> U(-0.2, 0.2);
  const FluidModel fm = rescaled(1.0);
  for (int k = 0; k < 20; ++k) {
    const Vec3 dPhi(fm.kprime() + U(rng), U(rng), U(rng));
    const AcousticalPair p = acoustical_metric(fm, dPhi);
    CHECK((p.g * p.ginv - Mat3::Identity()).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK(p.ginv(0, 0) == doctest::Approx(-1.0).epsilon(1e-13));
  }
}

TEST_CASE("physicality") {
  for (double s : {0.5, 1.0, 2.0}) CHECK(physicality_check(power_lagrangian(s), 0.5, 2.0).pass);
  const PhysicalityReport lin = physicality_check(power_lagrangian(0.0), 0.5, 2.0);
  CHECK_FALSE(lin.pass);
  CHECK(lin.first_violation == "d2L/dsigma2 > 0");
  Lagrangian neg = power_lagrangian(0.0);
  neg.f = [](double x) { return -x; };
  neg.d1 = [](double) { return -1.0; };
  const PhysicalityReport r = physicality_check(neg, 0.5, 2.0);
  CHECK_FALSE(r.pass);
  CHECK(r.first_violation == "L > 0");
}

TEST_CASE("rescaling") {
  const FluidModel fm = make_fluid_model(power_lagrangian(1.0), 1.0);
  const FluidModel r1 = rescale_coordinates(fm), r2 = rescale_coordinates(r1);
  CHECK(r2.cbar == r1.cbar);
  CHECK(r2.kprime() == r1.kprime());
  CHECK(r1.kprime() * r1.cbar == doctest::Approx(fm.k).epsilon(1e-15));
}

TEST_CASE("Riemann invariants") {
  const FluidModel fm = rescaled(1.0);
  const auto [rm, rp] = riemann_invariants(fm, 0.0, 0.0);
  CHECK(rm == 0.0);
  CHECK(rp == 0.0);
  const auto [p0, p1] = reconstruct_psi(fm, 0.0, 0.0);
  CHECK(std::abs(p0) < 1e-15);
  CHECK(p1 == 0.0);

  std::mt19937 rng(9);
  std::uniform_real_distribution<double> U(-0.05, 0.05);
  for (int k = 0; k < 50; ++k) {
    const double a = U(rng), b = U(rng);
    const auto [m, p] = riemann_invariants(fm, a, b);
    const auto [a2, b2] = reconstruct_psi(fm, m, p);
    CHECK(std::abs(a2 - a) <= 1e-9);
    CHECK(std::abs(b2 - b) <= 1e-9);
  }
  const auto [q0, q1] = reconstruct_psi(fm, 0.03, 0.03);
  CHECK(q1 == 0.0);
  (void)q0;
  const auto s1 = reconstruct_psi(fm, 0.02, -0.01), s2 = reconstruct_psi(fm, -0.01, 0.02);
  CHECK(s1.first == doctest::Approx(s2.first).epsilon(1e-15));
  CHECK(s1.second == doctest::Approx(-s2.second).epsilon(1e-15));
}

TEST_CASE("enthalpy integral closed form against quadrature") {
  for (double s : {0.5, 1.0, 2.0}) {
    const FluidModel fm = rescaled(s, 1.2);
    for (double S : {0.8, 1.0, 1.2, 1.7, 2.3}) {
      CHECK(std::abs(enthalpy_integral(fm, S) - std::log(S / fm.k) / fm.cbar) <= 1e-15);
      CHECK(std::abs(enthalpy_integral(fm, S) - enthalpy_integral_quadrature(fm, S)) <= 1e-10);
    }
  }
}

TEST_CASE("system G") {
  const FluidModel lin = rescaled(0.0);
  const SystemEval z = system_G(lin, Vec3::Zero());
  for (const auto& G : z.G) CHECK(G.cwiseAbs().maxCoeff() == 0.0);

  const FluidModel fm = rescaled(1.0);
  std::mt19937 rng(13);
  std::uniform_real_distribution<double> U(-0.05, 0.05);
  for (int k = 0; k < 10; ++k) {
    const Vec3 P(U(rng), U(rng), U(rng));
    const SystemEval e = system_G(fm, P);
    // The symmetric object is the Hessian of the Lagrangian; the metric form
    // differs from it by a sigma-dependent factor.
    CHECK(e.hessian_symmetry_defect <= 1e-10);
    CHECK(e.ginv(0, 0) == doctest::Approx(-1.0).epsilon(1e-13));
    // Centered differences converge to the analytic G at second order.
    for (int l = 0; l < 3; ++l) {
      auto err = [&](double h) {
        Vec3 a = P, b = P;
        a[l] += h;
        b[l] -= h;
        return ((system_G(fm, a).g - system_G(fm, b).g) / (2 * h) - e.G[l]).cwiseAbs().maxCoeff();
      };
      const double e1 = err(1e-3), e2 = err(5e-4);
      CHECK((e1 < 1e-9 || e1 / e2 > 3.5));
    }
  }
}

TEST_CASE("null form") {
  const FluidModel fm = rescaled(1.0);
  const SystemEval e = system_G(fm, Vec3(0.01, -0.02, 0.005));
  CHECK(null_form_Q(e, Mat3::Zero(), Vec3::Zero()) == 0.0);
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  Mat3 D;
  for (int i = 0; i < 9; ++i) D(i / 3, i % 3) = U(rng);
  const Vec3 v(U(rng), U(rng), U(rng));
  CHECK(null_form_Q(e, 2.0 * D, -3.0 * v) == doctest::Approx(-6.0 * null_form_Q(e, D, v)).epsilon(1e-13));
  // D(beta, alpha) = c_alpha v_beta: the antisymmetric bracket vanishes.
  const Vec3 c(0.3, -0.4, 0.2);
  const Mat3 Dsym = v * c.transpose();
  double bracket = 0.0;
  for (int mu = 0; mu < 3; ++mu)
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) bracket += e.Graise[mu](a, b) * (Dsym(b, a) * v[mu] - Dsym(mu, a) * v[b]);
  CHECK(std::abs(bracket) < 1e-14);
}

TEST_CASE("system mu transport") {
  const FluidModel fm = rescaled(1.0);
  const SystemEval e = system_G(fm, Vec3::Zero());
  const FrameState f = plane_frame(characteristic_speeds(fm, 0.0, 0.0), 1.0);
  CHECK(system_mu_transport_rhs(e, f, Vec3::Zero(), Vec3::Zero()) == 0.0);
}

TEST_CASE("hierarchy data") {
  const FluidModel fm = rescaled(1.0);
  const std::vector<double> x = linspace(-0.25, 1.25, 8193);
  const HierarchyData z = build_hierarchy_data(fm, 0.0, 1.0, BumpSpec{}, x);
  CHECK(z.delta_star == 0.0);
  for (double r : z.Rplus) CHECK(r == 0.0);

  const HierarchyData d = build_hierarchy_data(fm, 0.01, 1.0, BumpSpec{}, x);
  CHECK(d.delta_star / d.delta0 >= 0.3);
  CHECK(d.delta_star / d.delta0 <= 0.7);
  CHECK(d.cancellation_ratio <= 10.0);
  for (double r : d.Rminus) CHECK(r == 0.0);

  BumpSpec fixed;
  fixed.width = d.width;
  const HierarchyData d2 = build_hierarchy_data(fm, 0.02, 1.0, fixed, x);
  CHECK(d2.delta_star / d.delta_star == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("Riemann evolution: trivial data stay trivial") {
  const FluidModel fm = rescaled(1.0);
  const std::vector<double> x = linspace(-0.25, 2.0, 512);
  const HierarchyData z = build_hierarchy_data(fm, 0.0, 1.0, BumpSpec{}, x);
  const RiemannResult r = evolve(fm, z, -0.25, 2.0, 512, 0.5);
  CHECK_FALSE(r.shocked);
  for (double v : r.Rminus) CHECK(v == 0.0);
  for (double v : r.Rplus) CHECK(v == 0.0);
  for (const auto& s : r.series) CHECK(s.mu_star == 1.0);
}

TEST_CASE("Riemann evolution: mirror symmetry") {
  const FluidModel fm = rescaled(1.0);
  const int n = 801;
  const std::vector<double> x = linspace(-1.0, 1.0, n);
  BumpSpec b;
  b.center = 0.3;
  b.width = 0.2;
  const HierarchyData d = build_hierarchy_data(fm, 0.01, 1.0, b, x);
  RiemannOptions o;
  o.x_min = -1.0;
  o.x_max = 1.0;
  o.n = n;
  o.t_max = 0.3;
  const RiemannResult right = riemann_solve(fm, d.Rminus, d.Rplus, o);
  std::vector<double> rm(n), rp(n, 0.0);
  for (int i = 0; i < n; ++i) rm[i] = d.Rplus[n - 1 - i];
  const RiemannResult left = riemann_solve(fm, rm, rp, o);
  double err = 0.0;
  for (int i = 0; i < n; ++i) {
    err = std::max(err, std::abs(left.Rminus[i] - right.Rplus[n - 1 - i]));
    err = std::max(err, std::abs(left.Rplus[i] - right.Rminus[n - 1 - i]));
  }
  CHECK(err <= 1e-14);
}

TEST_CASE("Riemann evolution: shock time and invariant drift") {
  const FluidModel fm = rescaled(1.0);
  auto run_at = [&](int n) {
    const std::vector<double> x = linspace(-0.25, 6.0, n);
    const HierarchyData d = build_hierarchy_data(fm, 0.01, 0.5, BumpSpec{}, x);
    return std::make_pair(d, evolve(fm, d, -0.25, 6.0, n, 10.0));
  };
  const auto [d2, r2] = run_at(2048);
  REQUIRE(r2.shocked);
  const double T = euler_blowup_time(fm, d2).T;
  CHECK(std::abs(r2.t_lifespan / T - 1.0) <= 0.02);
  // Lifespan against the measured delta_star.
  CHECK(std::abs(r2.t_lifespan * d2.delta_star - 1.0) <= 0.1);
  CHECK(r2.max_abs_rminus <= 1e-12);
}

TEST_CASE("Riemann evolution: invariant drift converges at second order") {
  const FluidModel fm = rescaled(1.0);
  auto drift = [&](int n) {
    const std::vector<double> x = linspace(-0.25, 2.5, n);
    const HierarchyData d = build_hierarchy_data(fm, 0.01, 0.5, BumpSpec{}, x);
    return evolve(fm, d, -0.25, 2.5, n, 1.5);
  };
  const RiemannResult a = drift(1024), b = drift(2048);
  CHECK(a.max_abs_rminus <= 1e-12);
  const double ratio = a.drift_rate / b.drift_rate;
  MESSAGE("drift " << a.drift_rate << " " << b.drift_rate << " ratio " << ratio);
  CHECK(ratio >= 3.0);
  CHECK(ratio <= 6.0);
}
