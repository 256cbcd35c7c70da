#include "shockform/geometry.hpp"

#include <cmath>
#include <sstream>

#include "shockform/errors.hpp"

namespace shock {

EikonalPointData eikonal_point(const Mat3& ginv, double d1u, double d2u) {
  EikonalPointData p;
  p.b = ginv(0, 1) * d1u + ginv(0, 2) * d2u;
  p.c = ginv(1, 1) * d1u * d1u + 2.0 * ginv(1, 2) * d1u * d2u + ginv(2, 2) * d2u * d2u;
  p.du = Vec3(eikonal_time_root(p.b, p.c), d1u, d2u);
  return p;
}

double eikonal_time_root(double b, double c) {
  const double disc = b * b + c;
  if (!(disc > 0.0)) {
    std::ostringstream os;
    os << "b^2 + c = " << disc;
    throw Error(Errc::DegenerateCharacteristic, os.str());
  }
  return b + std::sqrt(disc);
}

double mu_from_eikonal(const EikonalPointData& point, const Mat3& ginv) {
  const double q0 = ginv.row(0).dot(point.du);
  const double mu = -1.0 / q0;
  if (!(mu > 0.0) || !std::isfinite(mu)) {
    std::ostringstream os;
    os << "mu = " << mu;
    throw Error(Errc::NonpositiveMu, os.str());
  }
  return mu;
}

FrameState build_frame(const MetricSample& s, double psi, const Vec3& du, double tol_id) {
  const double b = s.ginv(0, 1) * du[1] + s.ginv(0, 2) * du[2];
  const double c = s.ginv(1, 1) * du[1] * du[1] + 2.0 * s.ginv(1, 2) * du[1] * du[2] +
                   s.ginv(2, 2) * du[2] * du[2];
  if (!(b * b + c > 0.0)) throw Error(Errc::DegenerateCharacteristic, "vanishing spatial gradient of u");
  EikonalPointData point{du, b, c};
  FrameState f;
  f.psi = psi;
  f.mu = mu_from_eikonal(point, s.ginv);
  const Vec3 q = s.ginv * du;
  f.L = -f.mu * q;
  if (std::abs(f.L[0] - 1.0) > 1e-12) {
    std::ostringstream os;
    os << "L^0 - 1 = " << f.L[0] - 1.0;
    throw Error(Errc::FrameDegenerate, os.str());
  }
  f.L[0] = 1.0;
  f.Lsmall = Vec2(f.L[1] - 1.0, f.L[2]);
  f.X = -f.L - s.ginv.row(0).transpose();
  f.X[0] = 0.0;
  const double r1 = f.L.dot(s.g * f.L);
  const double r2 = f.X.dot(s.g * f.X) - 1.0;
  const double r3 = f.L.dot(s.g * f.X) + 1.0;
  const double worst = std::max({std::abs(r1), std::abs(r2), std::abs(r3)});
  if (worst > 10.0 * tol_id) {
    std::ostringstream os;
    os << "frame identity residual " << worst;
    throw Error(Errc::FrameDegenerate, os.str());
  }
  return f;
}

FrameState build_frame(const MetricModel& model, double psi, const Vec3& du, double tol_id) {
  return build_frame(model.sample(psi), psi, du, tol_id);
}

FrameState build_frame_spatial(const MetricSample& s, double psi, double d1u, double d2u,
                               double tol_id) {
  const EikonalPointData p = eikonal_point(s.ginv, d1u, d2u);
  return build_frame(s, psi, p.du, tol_id);
}

Mat2 spatial_inverse(const Mat3& g) {
  const Mat2 gb = g.block<2, 2>(1, 1);
  const double det = gb.determinant();
  if (!(std::abs(det) >= 1e-14)) throw Error(Errc::SingularMetric, "spatial block is singular");
  return gb.inverse();
}

Sigma0Relations sigma0_relations(const MetricSample& s) {
  const Mat2 gbi = spatial_inverse(s.g);
  Sigma0Relations r;
  const double root = std::sqrt(gbi(0, 0));
  r.mu = 1.0 / root;
  r.Lsmall[0] = gbi(0, 0) / root - 1.0 - s.ginv(0, 1);
  r.Lsmall[1] = gbi(1, 0) / root - s.ginv(0, 2);
  r.Xi[0] = gbi(0, 0) / gbi(0, 0) - 1.0;
  r.Xi[1] = gbi(1, 0) / gbi(0, 0);
  return r;
}

Sigma0Relations sigma0_relations(const MetricModel& model, double psi) {
  return sigma0_relations(model.sample(psi));
}

Vec2 unit_torus_vector(const Mat3& g, double d1u, double d2u) {
  const Vec2 e(d2u, -d1u);
  const double n2 = g(1, 1) * e[0] * e[0] + 2.0 * g(1, 2) * e[0] * e[1] + g(2, 2) * e[1] * e[1];
  return e / std::sqrt(n2);
}

GFrameComponents g_frame_components(const MetricSample& s, const FrameState& f, const Vec2& th) {
  const Vec3 T(0.0, th[0], th[1]);
  GFrameComponents c;
  const Vec3 GL = s.G * f.L, GX = s.G * f.X, GT = s.G * T;
  c.G_LL = f.L.dot(GL);
  c.G_LX = f.X.dot(GL);
  c.G_XX = f.X.dot(GX);
  c.Gs_L = T.dot(GL);
  c.Gs_X = T.dot(GX);
  c.Gs = T.dot(GT);
  const Vec3 PL = s.Gprime * f.L, PX = s.Gprime * f.X, PT = s.Gprime * T;
  c.Gp_LL = f.L.dot(PL);
  c.Gp_LX = f.X.dot(PL);
  c.Gp_XX = f.X.dot(PX);
  c.Gps_L = T.dot(PL);
  c.Gps_X = T.dot(PX);
  c.Gps = T.dot(PT);
  return c;
}

double mu_transport_rhs(const FrameState& f, const GFrameComponents& gf, double LPsi,
                        double XbrevePsi) {
  return 0.5 * gf.G_LL * XbrevePsi - 0.5 * f.mu * gf.G_LL * LPsi - f.mu * gf.G_LX * LPsi;
}

double lsmall_transport_rhs(const FrameState& f, const GFrameComponents& gf, double LPsi,
                            double dslashPsi, const Vec2& dslash_x, int i) {
  // N = L + X has N^i = -(g^-1)^{0i}.
  const double g0i = -(f.L[i] + f.X[i]);
  const double dxi = dslash_x[i - 1];
  return -0.5 * gf.G_LL * LPsi * f.L[i] - 0.5 * gf.G_LL * LPsi * g0i - gf.Gs_L * dxi * LPsi +
         0.5 * gf.G_LL * dslashPsi * dxi;
}

double trchi(const FrameState& f, const Mat3& g, const Vec2& dslash_L, const Vec2& dslash_x,
             const GFrameComponents& gf, double LPsi) {
  (void)f;
  double chi = 0.0;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) chi += g(1 + a, 1 + b) * dslash_L[a] * dslash_x[b];
  return chi + 0.5 * gf.Gs * LPsi;
}

double jacobian_det(double mu, double det_gbar, double upsilon) {
  return mu / std::sqrt(det_gbar) * upsilon;
}

long delta_star_argmax(std::span<const double> samples) {
  long best = -1;
  double worst = 0.0;
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const double neg = samples[k] < 0.0 ? -samples[k] : 0.0;
    if (neg > worst) {
      worst = neg;
      best = static_cast<long>(k);
    }
  }
  return best;
}

double delta_star(std::span<const double> samples) {
  const long k = delta_star_argmax(samples);
  return k < 0 ? 0.0 : -0.5 * samples[static_cast<std::size_t>(k)];
}

FrameResiduals frame_identity_residuals(const FrameState& f, const MetricSample& s, const Vec3& du) {
  FrameResiduals r;
  r.g_LL = f.L.dot(s.g * f.L);
  r.g_XX = f.X.dot(s.g * f.X) - 1.0;
  r.g_LX = f.L.dot(s.g * f.X) + 1.0;
  r.L_du = f.L.dot(du);
  r.Xb_du = f.mu * f.X.dot(du) - 1.0;
  r.eikonal = du.dot(s.ginv * du);
  const Mat2 gbi = spatial_inverse(s.g);
  const Vec2 ds(du[1], du[2]);
  r.mu_inv_sq = 1.0 / (f.mu * f.mu) - ds.dot(gbi * ds);
  return r;
}

}  // namespace shock
