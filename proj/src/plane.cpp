#include "shockform/plane.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "shockform/errors.hpp"
#include "shockform/fit.hpp"
#include "shockform/geometry.hpp"
#include "shockform/interp.hpp"
#include "shockform/parallel.hpp"

namespace shock {

namespace {

struct FanPoint {
  double slope, mu0, coeff, X1, dpsi;
};

FanPoint fan_point(const MetricModel& model, const Profile& prof, double u) {
  const auto p = prof.eval(u);
  const MetricSample s = model.sample(p[0]);
  const FrameState f = build_frame_spatial(s, p[0], -1.0, 0.0);
  const Vec2 th = unit_torus_vector(s.g, -1.0, 0.0);
  const GFrameComponents gf = g_frame_components(s, f, th);
  // d_1 psi = -profile'(u) since d_1 u = -1 on the initial slice.
  const double xb = f.mu * f.X[1] * (-p[1]);
  return {f.L[1], f.mu, 0.5 * gf.G_LL * xb, f.X[1], p[1]};
}

template <class F>
std::pair<double, double> golden_min(F f, double a, double b, double tol) {
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - gr * (b - a), d = a + gr * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 300 && (b - a) > tol; ++it) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = f(d);
    }
  }
  const double x = fc <= fd ? c : d;
  return {x, std::min(fc, fd)};
}

double crossing_time(double mu0, double coeff) {
  return coeff < 0.0 ? -mu0 / coeff : std::numeric_limits<double>::infinity();
}

}  // namespace

CharacteristicFan simple_wave_fan(const MetricModel& model, const SimpleWaveData& data) {
  if (genuine_nonlinearity_coefficient(model) == 0.0)
    throw Error(Errc::NoShockPredicted, "model is not genuinely nonlinear");
  if (!model.normalized()) throw Error(Errc::ValidationError, "fan requires a time-normalized model");
  const int n = std::max(2, data.n_u);
  CharacteristicFan fan;
  fan.u.resize(n);
  fan.x0.resize(n);
  fan.slope.resize(n);
  fan.mu0.resize(n);
  fan.coeff.resize(n);
  fan.X1.resize(n);
  fan.dpsi.resize(n);
  parallel_for(n, [&](std::size_t b, std::size_t e) {
    for (std::size_t k = b; k < e; ++k) {
      const double u = static_cast<double>(k) / (n - 1);
      const FanPoint p = fan_point(model, data.profile, u);
      fan.u[k] = u;
      fan.x0[k] = 1.0 - u;
      fan.slope[k] = p.slope;
      fan.mu0[k] = p.mu0;
      fan.coeff[k] = p.coeff;
      fan.X1[k] = p.X1;
      fan.dpsi[k] = p.dpsi;
    }
  }, 64);
  fan.point = [model, prof = data.profile](double u) {
    const FanPoint p = fan_point(model, prof, u);
    return std::array<double, 2>{p.mu0, p.coeff};
  };
  return fan;
}

namespace {

std::array<double, 2> fan_interp(const CharacteristicFan& fan, double u) {
  const std::size_t n = fan.u.size();
  if (u <= fan.u.front()) return {fan.mu0.front(), fan.coeff.front()};
  if (u >= fan.u.back()) return {fan.mu0.back(), fan.coeff.back()};
  const std::size_t k = std::upper_bound(fan.u.begin(), fan.u.end(), u) - fan.u.begin();
  const std::size_t j = std::min(k, n - 1);
  const double a = (u - fan.u[j - 1]) / (fan.u[j] - fan.u[j - 1]);
  return {(1 - a) * fan.mu0[j - 1] + a * fan.mu0[j], (1 - a) * fan.coeff[j - 1] + a * fan.coeff[j]};
}

}  // namespace

double simple_wave_mu(const CharacteristicFan& fan, double t, double u) {
  const auto c = fan_interp(fan, u);
  return c[0] + t * c[1];
}

BlowupPrediction simple_wave_blowup_time(const CharacteristicFan& fan) {
  const std::size_t n = fan.u.size();
  long best = -1;
  double T = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < n; ++k) {
    const double Tk = crossing_time(fan.mu0[k], fan.coeff[k]);
    if (Tk < T) {
      T = Tk;
      best = static_cast<long>(k);
    }
  }
  if (best < 0) throw Error(Errc::NoShockPredicted, "coefficient is nonnegative on every sample");
  const std::size_t k = static_cast<std::size_t>(best);
  const double a = fan.u[k > 0 ? k - 1 : k], b = fan.u[std::min(n - 1, k + 1)];
  auto f = [&](double u) {
    const auto c = fan.point ? fan.point(u) : fan_interp(fan, u);
    return crossing_time(c[0], c[1]);
  };
  BlowupPrediction out{T, fan.u[k]};
  if (b > a) {
    const auto [u, Tr] = golden_min(f, a, b, 1e-12 * std::max(1.0, b - a));
    if (Tr < T) out = {Tr, u};
  }
  return out;
}

double fan_delta_star(const CharacteristicFan& fan) {
  std::vector<double> s(fan.coeff.size());
  for (std::size_t k = 0; k < s.size(); ++k) s[k] = 2.0 * fan.coeff[k];
  return delta_star(s);
}

std::vector<PlaneSample> simple_wave_series(const CharacteristicFan& fan, double t_end, int n_t) {
  std::vector<PlaneSample> out;
  for (int j = 0; j < n_t; ++j) {
    const double t = n_t > 1 ? t_end * j / (n_t - 1) : 0.0;
    PlaneSample s{t, 1.0, 0.0};
    double mu_min = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < fan.u.size(); ++k) {
      const double mu = fan.mu0[k] + t * fan.coeff[k];
      mu_min = std::min(mu_min, mu);
      if (mu > 0.0) s.max_abs_dxpsi = std::max(s.max_abs_dxpsi, std::abs(fan.dpsi[k] / (mu * fan.X1[k])));
    }
    s.mu_star = std::min(1.0, mu_min);
    if (mu_min <= 0.0) s.max_abs_dxpsi = std::numeric_limits<double>::infinity();
    out.push_back(s);
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

struct MarkerRates {
  double speed = 0.0;
  double dmu = 0.0;
  double dxpsi = 0.0;
};

struct PlaneGrid {
  double x0, h;
  int n;
};

MarkerRates marker_rates(const FluidModel& fm, const PlaneGrid& g, const std::vector<double>& Rm,
                         double x, double rp, double drp_du, double mu) {
  const auto rm = cubic_interp(Rm, g.n, g.x0, g.h, x);
  const auto [p0, p1] = reconstruct_psi(fm, rm[0], rp);
  const PlaneSpeeds sp = characteristic_speeds(fm, p0, p1);
  const FrameState f = plane_frame(sp, mu);
  const SystemEval sys = system_G(fm, Vec3(p0, p1, 0.0));
  const Mat2 J = reconstruct_jacobian(fm, rm[0], rp);
  // Xbreve R+ is the label derivative; Xbreve R- uses the carried mu.
  const double xb_rm = mu * f.X[1] * rm[1];
  const double L_rm = (sp.plus + sp.minus) * rm[1];
  const Vec3 Xb(J(0, 0) * xb_rm + J(0, 1) * drp_du, J(1, 0) * xb_rm + J(1, 1) * drp_du, 0.0);
  const Vec3 LP(J(0, 0) * L_rm, J(1, 0) * L_rm, 0.0);
  MarkerRates r;
  r.speed = sp.plus;
  r.dmu = system_mu_transport_rhs(sys, f, LP, Xb);
  r.dxpsi = std::abs(Xb[1] / (mu * f.X[1]));
  return r;
}

void backtrace(const FluidModel& fm, const PlaneGrid& g, const std::vector<double>& Rm,
               const std::vector<double>& Rp, const std::vector<double>& lp_mid,
               const std::vector<double>& lm_mid, double dt, std::vector<double>& Rm_new,
               std::vector<double>& Rp_new) {
  (void)fm;
  parallel_for(static_cast<std::size_t>(g.n), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      const double xi = g.x0 + g.h * static_cast<double>(i);
      // R+ travels with dx/dt = plus, R- with dx/dt = -minus; midpoint rule.
      double xf = xi - dt * lp_mid[i];
      for (int it = 0; it < 3; ++it) xf = xi - dt * cubic_interp(lp_mid, g.n, g.x0, g.h, 0.5 * (xi + xf))[0];
      Rp_new[i] = cubic_interp(Rp, g.n, g.x0, g.h, xf)[0];
      double xg = xi + dt * lm_mid[i];
      for (int it = 0; it < 3; ++it) xg = xi + dt * cubic_interp(lm_mid, g.n, g.x0, g.h, 0.5 * (xi + xg))[0];
      Rm_new[i] = cubic_interp(Rm, g.n, g.x0, g.h, xg)[0];
    }
  }, 256);
}

void node_speeds(const FluidModel& fm, const std::vector<double>& Rm, const std::vector<double>& Rp,
                 std::vector<double>& lp, std::vector<double>& lm) {
  parallel_for(Rm.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      const auto [p0, p1] = reconstruct_psi(fm, Rm[i], Rp[i]);
      const PlaneSpeeds sp = characteristic_speeds(fm, p0, p1);
      lp[i] = sp.plus;
      lm[i] = sp.minus;
    }
  }, 256);
}

}  // namespace

RiemannResult riemann_solve(const FluidModel& fm, const std::vector<double>& Rminus0,
                            const std::vector<double>& Rplus0, const RiemannOptions& opt) {
  const int n = opt.n;
  if (static_cast<int>(Rminus0.size()) != n || static_cast<int>(Rplus0.size()) != n || n < 8)
    throw Error(Errc::ValidationError, "riemann_solve: data size does not match grid");
  const PlaneGrid g{opt.x_min, (opt.x_max - opt.x_min) / (n - 1), n};
  RiemannResult res;
  res.x.resize(n);
  for (int i = 0; i < n; ++i) res.x[i] = g.x0 + g.h * i;

  std::vector<double> Rm = Rminus0, Rp = Rplus0, Rm_new(n), Rp_new(n);
  std::vector<double> lp(n), lm(n), lp_old(n), lm_old(n), lp_mid(n), lm_mid(n);
  node_speeds(fm, Rm, Rp, lp, lm);

  // Markers on the support of R+ follow L.
  int first = -1, last = -1;
  for (int i = 0; i < n; ++i)
    if (Rp[i] != 0.0) {
      if (first < 0) first = i;
      last = i;
    }
  const int nm = first >= 0 ? std::max(3, opt.n_markers) : 0;
  std::vector<double> mx(nm), mrp(nm), mdrp(nm), mmu(nm), mu0(nm);
  res.marker_u.resize(nm);
  for (int k = 0; k < nm; ++k) {
    const double xa = res.x[std::max(0, first - 1)], xb = res.x[std::min(n - 1, last + 1)];
    mx[k] = xa + (xb - xa) * k / (nm - 1);
    const auto rp = cubic_interp(Rp, n, g.x0, g.h, mx[k]);
    mrp[k] = rp[0];
    mdrp[k] = opt.dRplus_dx ? -opt.dRplus_dx(mx[k]) : -rp[1];  // u = 1 - x on the initial slice
    const auto [p0, p1] = reconstruct_psi(fm, cubic_interp(Rm, n, g.x0, g.h, mx[k])[0], rp[0]);
    const PlaneSpeeds sp = characteristic_speeds(fm, p0, p1);
    mmu[k] = 2.0 / (sp.plus + sp.minus);
    mu0[k] = mmu[k];
    res.marker_u[k] = 1.0 - mx[k];
  }

  auto geo_mu = [&](std::vector<double>& out) {
    out.assign(nm, 0.0);
    for (int k = 0; k < nm; ++k) {
      const int a = std::max(0, k - 1), b = std::min(nm - 1, k + 1);
      const double dxdu = (mx[b] - mx[a]) / (res.marker_u[b] - res.marker_u[a]);
      const auto rm = cubic_interp(Rm, n, g.x0, g.h, mx[k])[0];
      const auto [p0, p1] = reconstruct_psi(fm, rm, mrp[k]);
      const PlaneSpeeds sp = characteristic_speeds(fm, p0, p1);
      out[k] = 2.0 * std::abs(dxdu) / (sp.plus + sp.minus);
    }
  };

  double t = 0.0, dt_prev = 0.0, mu_star = 1.0, dmu_star = 0.0;
  std::vector<double> ts, mus;
  std::vector<MarkerRates> r1(nm), r2(nm);
  std::vector<double> mx_pred(nm), mmu_pred(nm), geo;
  auto record = [&](double tt) {
    RiemannSample s;
    s.t = tt;
    double mmin = std::numeric_limits<double>::infinity();
    for (int k = 0; k < nm; ++k) {
      mmin = std::min(mmin, mmu[k]);
      const MarkerRates r = marker_rates(fm, g, Rm, mx[k], mrp[k], mdrp[k], mmu[k]);
      s.max_abs_dxpsi = std::max(s.max_abs_dxpsi, r.dxpsi);
      s.drift = std::max(s.drift, std::abs(cubic_interp(Rp, n, g.x0, g.h, mx[k])[0] - mrp[k]));
    }
    for (int i = 0; i < n; ++i) s.max_abs_rminus = std::max(s.max_abs_rminus, std::abs(Rm[i]));
    s.mu_star = std::min(1.0, nm > 0 ? mmin : 1.0);
    res.series.push_back(s);
    ts.push_back(tt);
    mus.push_back(s.mu_star);
    res.max_abs_rminus = std::max(res.max_abs_rminus, s.max_abs_rminus);
    if (s.mu_star >= 0.5 && tt > 0.0) res.drift_rate = std::max(res.drift_rate, s.drift / tt);
    if (s.mu_star >= 0.2 && nm > 0) {
      geo_mu(geo);
      for (int k = 1; k + 1 < nm; ++k)
        res.transport_geo_gap = std::max(res.transport_geo_gap, std::abs(geo[k] - mmu[k]));
    }
    return s.mu_star;
  };
  mu_star = record(0.0);

  while (t < opt.t_max && mu_star > opt.mu_stop) {
    double vmax = 0.0;
    for (int i = 0; i < n; ++i) vmax = std::max({vmax, std::abs(lp[i]), std::abs(lm[i])});
    double dt = opt.cfl * g.h / vmax;
    if (dmu_star < 0.0) dt = std::min(dt, 0.1 * mu_star / -dmu_star);
    dt = std::min(dt, opt.t_max - t);
    if (!(dt >= 1e-9)) {
      std::ostringstream os;
      os << "time step " << dt << " underflows at t = " << t;
      throw Error(Errc::CFLViolation, os.str());
    }
    for (int i = 0; i < n; ++i) {
      const double c = dt_prev > 0.0 ? 0.5 * dt / dt_prev : 0.0;
      lp_mid[i] = lp[i] + c * (lp[i] - lp_old[i]);
      lm_mid[i] = lm[i] + c * (lm[i] - lm_old[i]);
    }
    // Heun predictor for the markers uses the old grid state.
    for (int k = 0; k < nm; ++k) {
      r1[k] = marker_rates(fm, g, Rm, mx[k], mrp[k], mdrp[k], mmu[k]);
      mx_pred[k] = mx[k] + dt * r1[k].speed;
      mmu_pred[k] = mmu[k] + dt * r1[k].dmu;
    }
    backtrace(fm, g, Rm, Rp, lp_mid, lm_mid, dt, Rm_new, Rp_new);
    Rm.swap(Rm_new);
    Rp.swap(Rp_new);
    lp_old = lp;
    lm_old = lm;
    node_speeds(fm, Rm, Rp, lp, lm);
    for (int k = 0; k < nm; ++k) {
      if (mx_pred[k] < opt.x_min || mx_pred[k] > opt.x_max)
        throw Error(Errc::InterpolationOutOfDomain, "marker left the domain");
      r2[k] = marker_rates(fm, g, Rm, mx_pred[k], mrp[k], mdrp[k], mmu_pred[k]);
      mx[k] += 0.5 * dt * (r1[k].speed + r2[k].speed);
      mmu[k] += 0.5 * dt * (r1[k].dmu + r2[k].dmu);
    }
    t += dt;
    dt_prev = dt;
    const double prev = mu_star;
    mu_star = record(t);
    dmu_star = (mu_star - prev) / dt;
  }
  res.t_end = t;
  res.Rminus = Rm;
  res.Rplus = Rp;
  res.marker_x = mx;
  res.marker_mu = mmu;
  geo_mu(res.marker_mu_geo);
  res.shocked = mu_star <= opt.mu_stop;
  res.t_lifespan = res.shocked ? extrapolate_zero(ts, mus, opt.mu_stop, 0.25)
                               : std::numeric_limits<double>::quiet_NaN();
  return res;
}

std::function<double(double)> hierarchy_slope(const HierarchyData& d) {
  return [eps0 = d.eps0, c = d.center, w = d.width](double x) {
    return w > 0.0 ? eps0 * bump((x - c) / w)[1] / w : 0.0;
  };
}

BlowupPrediction euler_blowup_time(const FluidModel& fm, const HierarchyData& d) {
  if (d.eps0 == 0.0) throw Error(Errc::NoShockPredicted, "trivial data");
  auto T = [&](double x) {
    const auto B = bump((x - d.center) / d.width);
    if (B[0] == 0.0) return std::numeric_limits<double>::infinity();
    const auto [mu0, rate] = plane_initial_mu_rate(fm, d.eps0 * B[0], d.eps0 * B[1] / d.width);
    return crossing_time(mu0, rate);
  };
  const int n = 4096;
  double best = std::numeric_limits<double>::infinity(), xb = d.center;
  for (int k = 1; k < n; ++k) {
    const double x = d.center - d.width + 2.0 * d.width * k / n;
    const double v = T(x);
    if (v < best) {
      best = v;
      xb = x;
    }
  }
  if (!std::isfinite(best)) throw Error(Errc::NoShockPredicted, "transport rate is nonnegative");
  const double h = 2.0 * d.width / n;
  const auto [x, Tr] = golden_min(T, xb - h, xb + h, 1e-13);
  BlowupPrediction out{std::min(best, Tr), 1.0 - (Tr < best ? x : xb)};
  return out;
}

}  // namespace shock
