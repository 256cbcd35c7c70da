#pragma once

#include <span>

#include "shockform/model.hpp"
#include "shockform/types.hpp"

namespace shock {

/// Gradient of the eikonal function at a point together with the two
/// contractions that determine the time root.
struct EikonalPointData {
  Vec3 du = Vec3::Zero();
  double b = 0.0;  // (g^-1)^{0i} d_i u
  double c = 0.0;  // (g^-1)^{ij} d_i u d_j u
};

EikonalPointData eikonal_point(const Mat3& ginv, double d1u, double d2u);

/// Positive root p of -p^2 + 2 b p + c = 0.
double eikonal_time_root(double b, double c);
/// mu = -1 / ((g^-1)^{0a} d_a u).
double mu_from_eikonal(const EikonalPointData& point, const Mat3& ginv);

struct FrameState {
  double psi = 0.0;
  double u = 0.0;
  double mu = 1.0;
  Vec3 L = Vec3(1.0, 1.0, 0.0);
  Vec2 Lsmall = Vec2::Zero();
  Vec3 X = Vec3(0.0, -1.0, 0.0);
  double upsilon = 1.0;
  double theta = 0.0;
};

/// Frame from a full spacetime gradient du whose time component is the
/// eikonal root. Raises FrameDegenerate if an identity residual exceeds
/// 10 * tol_id.
FrameState build_frame(const MetricSample& s, double psi, const Vec3& du, double tol_id = 1e-10);
FrameState build_frame(const MetricModel& model, double psi, const Vec3& du, double tol_id = 1e-10);
/// Same, with the time component of du filled in from the eikonal root.
FrameState build_frame_spatial(const MetricSample& s, double psi, double d1u, double d2u,
                               double tol_id = 1e-10);

/// Quantities fixed on the initial slice by u = 1 - x1.
struct Sigma0Relations {
  double mu = 1.0;
  Vec2 Lsmall = Vec2::Zero();
  Vec2 Xi = Vec2::Zero();
};
Sigma0Relations sigma0_relations(const MetricModel& model, double psi);
Sigma0Relations sigma0_relations(const MetricSample& s);

/// Inverse of the spatial 2x2 block of g (the first fundamental form).
Mat2 spatial_inverse(const Mat3& g);

/// Frame components of G and G'. The slashed entries use the unit torus
/// vector Theta/upsilon, so for a single torus direction they are plain
/// scalars.
struct GFrameComponents {
  double G_LL = 0, G_LX = 0, G_XX = 0, Gs_L = 0, Gs_X = 0, Gs = 0;
  double Gp_LL = 0, Gp_LX = 0, Gp_XX = 0, Gps_L = 0, Gps_X = 0, Gps = 0;
};

/// Unit (with respect to g) spatial vector tangent to the level sets of u,
/// oriented as +x2 on the flat background.
Vec2 unit_torus_vector(const Mat3& g, double d1u, double d2u);

GFrameComponents g_frame_components(const MetricSample& s, const FrameState& f, const Vec2& theta_hat);

/// L mu = 1/2 G_LL Xbreve(psi) - 1/2 mu G_LL L(psi) - mu G_LX L(psi).
double mu_transport_rhs(const FrameState& f, const GFrameComponents& gf, double LPsi,
                        double XbrevePsi);

/// L(L^i_small). dslashPsi is the derivative of psi along the unit torus
/// vector and dslash_x that vector's rectangular components.
double lsmall_transport_rhs(const FrameState& f, const GFrameComponents& gf, double LPsi,
                            double dslashPsi, const Vec2& dslash_x, int i);

/// Null expansion tr chi. dslash_L holds the derivatives of L^1, L^2 along
/// the unit torus vector.
double trchi(const FrameState& f, const Mat3& g, const Vec2& dslash_L, const Vec2& dslash_x,
             const GFrameComponents& gf, double LPsi);

/// mu * (det g_ij)^(-1/2) * upsilon.
double jacobian_det(double mu, double det_gbar, double upsilon);

/// Half of the largest negative part among samples of G_LL * Xbreve(psi).
double delta_star(std::span<const double> samples);
/// Index of the sample attaining the sup (first one on ties), or -1.
long delta_star_argmax(std::span<const double> samples);

struct FrameResiduals {
  double g_LL = 0;       // g(L,L)
  double g_XX = 0;       // g(X,X) - 1
  double g_LX = 0;       // g(L,X) + 1
  double L_du = 0;       // L u
  double Xb_du = 0;      // Xbreve u - 1
  double eikonal = 0;    // (g^-1)(du, du)
  double mu_inv_sq = 0;  // mu^-2 - (gbar^-1)(du, du)
};

FrameResiduals frame_identity_residuals(const FrameState& f, const MetricSample& s, const Vec3& du);

}  // namespace shock
