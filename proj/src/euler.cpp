#include "shockform/euler.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <sstream>

#include "shockform/errors.hpp"

namespace shock {

Lagrangian power_lagrangian(double s) {
  Lagrangian L;
  L.s = s;
  L.f = [s](double x) { return std::pow(x, s + 1.0); };
  L.d1 = [s](double x) { return (s + 1.0) * std::pow(x, s); };
  L.d2 = [s](double x) { return (s + 1.0) * s * std::pow(x, s - 1.0); };
  L.d3 = [s](double x) { return (s + 1.0) * s * (s - 1.0) * std::pow(x, s - 2.0); };
  std::ostringstream os;
  os << "sigma^" << (s + 1.0);
  L.label = os.str();
  return L;
}

double fluid_F(const Lagrangian& lag, double sg) { return 2.0 * lag.d2(sg) / lag.d1(sg); }

double fluid_dF(const Lagrangian& lag, double sg) {
  const double a = lag.d1(sg), b = lag.d2(sg), c = lag.d3(sg);
  return 2.0 * (c * a - b * b) / (a * a);
}

namespace {

double raw_sound_speed(const Lagrangian& lag, double sg) {
  const double q = 1.0 + sg * fluid_F(lag, sg);
  if (!(q > 0.0)) {
    std::ostringstream os;
    os << "1 + sigma F = " << q << " at sigma = " << sg;
    throw Error(Errc::PhysicalityViolated, os.str());
  }
  const double cs = std::sqrt(1.0 / q);
  if (!(cs > 0.0 && cs <= 1.0)) {
    std::ostringstream os;
    os << "sound speed " << cs << " outside (0, 1]";
    throw Error(Errc::PhysicalityViolated, os.str());
  }
  return cs;
}

void check_sigma(const FluidModel& fm, double sg) {
  if (!(sg > 0.0)) {
    std::ostringstream os;
    os << "sigma = " << sg;
    throw Error(Errc::FluidValidity, os.str());
  }
  (void)fm;
}

}  // namespace

FluidModel make_fluid_model(const Lagrangian& lag, double k) {
  FluidModel fm;
  fm.lag = lag;
  fm.k = k;
  fm.sigma_lo = 0.25 * k * k;
  fm.sigma_hi = 4.0 * k * k;
  fm.cbar = raw_sound_speed(lag, k * k);
  return fm;
}

FluidModel rescale_coordinates(const FluidModel& fm) {
  FluidModel r = fm;
  r.rescaled = true;
  return r;
}

double sigma(const Vec3& dPhi, const Mat3& minkowski) {
  const Mat3 minv = minkowski.inverse();
  const double sg = -dPhi.dot(minv * dPhi);
  if (!(sg > 0.0)) {
    std::ostringstream os;
    os << "sigma = " << sg;
    throw Error(Errc::FluidValidity, os.str());
  }
  return sg;
}

double sound_speed(const FluidModel& fm, double sg) {
  check_sigma(fm, sg);
  const double cs = raw_sound_speed(fm.lag, sg);
  return fm.rescaled ? cs / fm.cbar : cs;
}

namespace {

Mat3 background(const FluidModel& fm) {
  Mat3 m = minkowski();
  const double c = fm.time_scale();
  m(0, 0) = -1.0 / (c * c);
  return m;
}

}  // namespace

AcousticalPair acoustical_metric(const FluidModel& fm, const Vec3& dPhi) {
  const Mat3 m = background(fm);
  const Mat3 minv = m.inverse();
  const double sg = sigma(dPhi, m);
  const double F = fluid_F(fm.lag, sg);
  raw_sound_speed(fm.lag, sg);
  const double H = F / (1.0 + sg * F);
  const Vec3 q = minv * dPhi;
  AcousticalPair p;
  p.g = m + H * dPhi * dPhi.transpose();
  p.ginv = minv - F * q * q.transpose();
  if (fm.rescaled) {
    const double phi = -p.ginv(0, 0);
    p.g *= phi;
    p.ginv /= phi;
  }
  const double err = (p.g * p.ginv - Mat3::Identity()).cwiseAbs().maxCoeff();
  if (err > 1e-10) {
    std::ostringstream os;
    os << "g g^-1 deviates from identity by " << err;
    throw Error(Errc::PhysicalityViolated, os.str());
  }
  return p;
}

PhysicalityReport physicality_check(const Lagrangian& lag, double lo, double hi) {
  constexpr int kPoints = 256;
  PhysicalityReport r;
  for (int i = 0; i < kPoints; ++i) {
    const double sg = lo + (hi - lo) * i / (kPoints - 1);
    const double f = lag.f(sg), d1 = lag.d1(sg), d2 = lag.d2(sg);
    const double dratio = d1 / std::sqrt(sg) - 0.5 * f / (sg * std::sqrt(sg));
    const char* bad = nullptr;
    if (!(f > 0.0))
      bad = "L > 0";
    else if (!(d1 > 0.0))
      bad = "dL/dsigma > 0";
    else if (!(dratio > 0.0))
      bad = "d(L/sqrt(sigma))/dsigma > 0";
    else if (!(d2 > 0.0))
      bad = "d2L/dsigma2 > 0";
    if (bad) {
      r.pass = false;
      r.first_violation = bad;
      r.sigma_at = sg;
      return r;
    }
  }
  return r;
}

SystemEval system_G(const FluidModel& fm, const Vec3& Psi_vec) {
  const Mat3 m = background(fm);
  const Mat3 minv = m.inverse();
  const double c = fm.time_scale();
  const Vec3 P(Psi_vec[0] + fm.kprime(), Psi_vec[1], Psi_vec[2]);
  const Vec3 q = minv * P;
  const double sg = -P.dot(q);
  check_sigma(fm, sg);
  const double F = fluid_F(fm.lag, sg), dF = fluid_dF(fm.lag, sg);
  const double H = F / (1.0 + sg * F);
  const double dH = (dF - F * F) / ((1.0 + sg * F) * (1.0 + sg * F));
  const Vec3 dsg = -2.0 * q;  // d sigma / d P_lambda

  const Mat3 g1 = m + H * P * P.transpose();
  const Mat3 g1inv = minv - F * q * q.transpose();
  // Conformal factor bringing (g^-1)^00 to -1.
  const double c4 = c * c * c * c;
  const double phi = c * c + F * c4 * P[0] * P[0];

  SystemEval out;
  out.g = phi * g1;
  out.ginv = g1inv / phi;
  for (int l = 0; l < 3; ++l) {
    Vec3 e = Vec3::Zero();
    e[l] = 1.0;
    const Mat3 dg1 = dH * dsg[l] * P * P.transpose() + H * (e * P.transpose() + P * e.transpose());
    const double dphi = dF * dsg[l] * c4 * P[0] * P[0] + (l == 0 ? 2.0 * F * c4 * P[0] : 0.0);
    out.G[l] = dphi * g1 + phi * dg1;
    out.Graise[l] = out.ginv * out.G[l] * out.ginv;
    out.Omega[l] = 0.5 * (out.ginv * out.G[l]).trace();
  }
  double defect = 0.0;
  for (int mu = 0; mu < 3; ++mu)
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        defect = std::max(defect, std::abs(out.Graise[mu](a, b) - out.Graise[b](a, mu)));
  out.symmetry_defect = defect;

  // Hessian of the Lagrangian, h = -2 L'(sigma) g1^-1, differentiated through F.
  const double d1 = fm.lag.d1(sg), d2 = fm.lag.d2(sg);
  std::array<Mat3, 3> T;
  for (int l = 0; l < 3; ++l) {
    const Vec3 ml = minv.col(l);
    const Mat3 dg1inv = -dF * dsg[l] * q * q.transpose() - F * (ml * q.transpose() + q * ml.transpose());
    T[l] = -(-2.0 * d2 * dsg[l] * g1inv - 2.0 * d1 * dg1inv);
  }
  double hdefect = 0.0;
  for (int mu = 0; mu < 3; ++mu)
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) hdefect = std::max(hdefect, std::abs(T[mu](a, b) - T[b](a, mu)));
  out.hessian_symmetry_defect = hdefect;
  if (hdefect > 1e-10 * std::max(1.0, T[0].cwiseAbs().maxCoeff())) {
    std::ostringstream os;
    os << "Lagrangian Hessian derivative not symmetric: " << hdefect;
    throw Error(Errc::PhysicalityViolated, os.str());
  }
  return out;
}

double null_form_Q(const SystemEval& sys, const Mat3& D, const Vec3& dPsi) {
  double q = 0.0;
  for (int mu = 0; mu < 3; ++mu)
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        q += sys.Graise[mu](a, b) * (D(b, a) * dPsi[mu] - D(mu, a) * dPsi[b]);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int l = 0; l < 3; ++l) q += sys.ginv(a, b) * sys.Omega[l] * D(a, l) * dPsi[b];
  return q;
}

double system_mu_transport_rhs(const SystemEval& sys, const FrameState& f, const Vec3& LPsi,
                               const Vec3& XbPsi, const Vec3& dslashPsi, const Vec2& theta_hat) {
  const Vec3 T(0.0, theta_hat[0], theta_hat[1]);
  const Vec3 Llow = sys.g * f.L, Xlow = sys.g * f.X, Tlow = sys.g * T;
  Vec3 GLL, GLX;  // G^lambda_{LL}, G^lambda_{LX}
  for (int l = 0; l < 3; ++l) {
    GLL[l] = f.L.dot(sys.G[l] * f.L);
    GLX[l] = f.L.dot(sys.G[l] * f.X);
  }
  const double GL_LL = GLL.dot(Llow);
  const double GX_LL = GLL.dot(Xlow);
  const double GT_LL = GLL.dot(Tlow);
  double XXb = 0.0, XL = 0.0, XT = 0.0;
  for (int a = 1; a < 3; ++a) {
    XXb += f.X[a] * XbPsi[a];
    XL += f.X[a] * LPsi[a];
    XT += f.X[a] * dslashPsi[a];
  }
  const double trans = -0.5 * GL_LL * XXb;
  const double tan = -0.5 * GL_LL * XL - 0.5 * GX_LL * XL + 0.5 * GT_LL * XT - 0.5 * GLL.dot(LPsi) -
                     GLX.dot(LPsi);
  return trans + f.mu * tan;
}

PlaneSpeeds characteristic_speeds(const FluidModel& fm, double Psi0p, double Psi1p) {
  const double cb = fm.cbar;
  const double P0 = Psi0p + fm.kprime();
  const double sg = cb * cb * P0 * P0 - Psi1p * Psi1p;
  check_sigma(fm, sg);
  const double v = Psi1p / P0;
  if (!(std::abs(v) < cb) || !(P0 > 0.0)) {
    std::ostringstream os;
    os << "|v| = " << std::abs(v) << " not below cbar = " << cb;
    throw Error(Errc::FluidValidity, os.str());
  }
  const double cs = raw_sound_speed(fm.lag, sg) / cb;
  PlaneSpeeds s;
  s.plus = (-v / (cb * cb) + cs) / (1.0 - v * cs);
  s.minus = (v / (cb * cb) + cs) / (1.0 + v * cs);
  return s;
}

FrameState plane_frame(const PlaneSpeeds& sp, double mu) {
  FrameState f;
  f.mu = mu;
  f.L = Vec3(1.0, sp.plus, 0.0);
  f.Lsmall = Vec2(sp.plus - 1.0, 0.0);
  f.X = Vec3(0.0, -0.5 * (sp.plus + sp.minus), 0.0);
  return f;
}

double enthalpy_integral_quadrature(const FluidModel& fm, double S) {
  auto integrand = [&](double s) { return 1.0 / (raw_sound_speed(fm.lag, s * s) * s); };
  double err = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, fm.k, S, 15, 1e-14,
                                                                        &err);
}

double enthalpy_integral(const FluidModel& fm, double S) {
  if (fm.lag.s >= 0.0) return std::log(S / fm.k) / fm.cbar;
  return enthalpy_integral_quadrature(fm, S);
}

namespace {

double invert_enthalpy(const FluidModel& fm, double I) {
  if (fm.lag.s >= 0.0) return fm.k * std::exp(fm.cbar * I);
  const double lo = std::sqrt(fm.sigma_lo), hi = std::sqrt(fm.sigma_hi);
  auto f = [&](double S) { return enthalpy_integral(fm, S) - I; };
  if (f(lo) * f(hi) > 0.0) {
    std::ostringstream os;
    os << "no sqrt(sigma) in [" << lo << ", " << hi << "] for integral " << I;
    throw Error(Errc::RootBracketFailure, os.str());
  }
  std::uintmax_t iters = 200;
  auto r = boost::math::tools::toms748_solve(f, lo, hi, boost::math::tools::eps_tolerance<double>(50),
                                             iters);
  return 0.5 * (r.first + r.second);
}

}  // namespace

std::pair<double, double> riemann_invariants(const FluidModel& fm, double Psi0p, double Psi1p) {
  characteristic_speeds(fm, Psi0p, Psi1p);  // validity
  const double cb = fm.cbar;
  const double P0 = Psi0p + fm.kprime();
  const double S = std::sqrt(cb * cb * P0 * P0 - Psi1p * Psi1p);
  const double v = Psi1p / P0;
  const double I = enthalpy_integral(fm, S);
  const double h = 0.5 * std::log((cb + v) / (cb - v));
  return {I + h, I - h};
}

std::pair<double, double> reconstruct_psi(const FluidModel& fm, double Rm, double Rp) {
  const double S = invert_enthalpy(fm, 0.5 * (Rm + Rp));
  const double w = 0.5 * (Rm - Rp);
  return {S * std::cosh(w) / fm.cbar - fm.kprime(), S * std::sinh(w)};
}

Mat2 reconstruct_jacobian(const FluidModel& fm, double Rm, double Rp) {
  const double S = invert_enthalpy(fm, 0.5 * (Rm + Rp));
  const double dS = 0.5 * raw_sound_speed(fm.lag, S * S) * S;  // dS/dR- = dS/dR+
  const double w = 0.5 * (Rm - Rp);
  const double ch = std::cosh(w), sh = std::sinh(w);
  Mat2 J;
  J(0, 0) = (dS * ch + 0.5 * S * sh) / fm.cbar;
  J(0, 1) = (dS * ch - 0.5 * S * sh) / fm.cbar;
  J(1, 0) = dS * sh + 0.5 * S * ch;
  J(1, 1) = dS * sh - 0.5 * S * ch;
  return J;
}

std::pair<double, double> plane_initial_mu_rate(const FluidModel& fm, double r, double dr) {
  const auto [p0, p1] = reconstruct_psi(fm, 0.0, r);
  const PlaneSpeeds sp = characteristic_speeds(fm, p0, p1);
  const double mu0 = 2.0 / (sp.plus + sp.minus);
  const FrameState f = plane_frame(sp, mu0);
  const SystemEval sys = system_G(fm, Vec3(p0, p1, 0.0));
  const Mat2 J = reconstruct_jacobian(fm, 0.0, r);
  // Xbreve = mu X^1 d_x; only R+ varies on the initial slice.
  const Vec3 Xb(mu0 * f.X[1] * J(0, 1) * dr, mu0 * f.X[1] * J(1, 1) * dr, 0.0);
  const double rate = system_mu_transport_rhs(sys, f, Vec3::Zero(), Xb);
  return {mu0, rate};
}

HierarchyData build_hierarchy_data(const FluidModel& fm, double eps0, double delta0,
                                   const BumpSpec& profile, const std::vector<double>& x) {
  HierarchyData d;
  d.x = x;
  d.eps0 = eps0;
  d.delta0 = delta0;
  d.center = profile.center;
  d.width = profile.width > 0.0 ? profile.width : eps0 * bump_max_slope() / delta0;
  const std::size_t n = x.size();
  d.Rminus.assign(n, 0.0);
  d.Rplus.assign(n, 0.0);
  d.Psi0p.assign(n, 0.0);
  d.Psi1p.assign(n, 0.0);
  if (eps0 == 0.0) return d;
  if (!(d.width > 0.0)) throw Error(Errc::HierarchyUnsatisfied, "bump width must be positive");
  std::vector<double> samples;
  samples.reserve(n);
  double cancel = 0.0;
  const double w = d.width;
  for (std::size_t i = 0; i < n; ++i) {
    const auto B = bump((x[i] - d.center) / w);
    const double r = eps0 * B[0];
    const double dr = eps0 * B[1] / w;
    d.Rplus[i] = r;
    d.max_dR = std::max(d.max_dR, std::abs(dr));
    d.max_d2R = std::max(d.max_d2R, std::abs(eps0 * B[2] / (w * w)));
    d.max_d3R = std::max(d.max_d3R, std::abs(eps0 * B[3] / (w * w * w)));
    const auto [p0, p1] = reconstruct_psi(fm, 0.0, r);
    d.Psi0p[i] = p0;
    d.Psi1p[i] = p1;
    if (B[0] == 0.0) continue;
    const auto [mu0, rate] = plane_initial_mu_rate(fm, r, dr);
    samples.push_back(2.0 * rate);
    const PlaneSpeeds sp = characteristic_speeds(fm, p0, p1);
    const Mat2 J = reconstruct_jacobian(fm, 0.0, r);
    const double X1 = -0.5 * (sp.plus + sp.minus);
    cancel = std::max(cancel, std::abs(mu0 * X1 * (J(0, 1) + J(1, 1)) * dr));
  }
  d.delta_star = delta_star(samples);
  d.cancellation_ratio = cancel / eps0;
  if (d.cancellation_ratio > 10.0) {
    std::ostringstream os;
    os << "max |Xbreve(Psi0' + Psi1')| / eps0 = " << d.cancellation_ratio << " > 10";
    throw Error(Errc::HierarchyUnsatisfied, os.str());
  }
  return d;
}

}  // namespace shock
