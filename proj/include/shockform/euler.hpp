#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "shockform/geometry.hpp"
#include "shockform/profile.hpp"
#include "shockform/types.hpp"

namespace shock {

/// Fluid Lagrangian L(sigma) with three derivatives.
struct Lagrangian {
  std::function<double(double)> f, d1, d2, d3;
  std::string label;
  double s = -1.0;  // exponent for sigma^(s+1); negative for other laws
};

/// L = sigma^(s+1), equation of state p = rho / (2s + 1).
Lagrangian power_lagrangian(double s);

/// Irrotational fluid around the constant state Phi = k t.
///
/// In rescaled form the time coordinate is t' = cbar t, the background
/// Minkowski metric becomes diag(-1/cbar^2, 1, 1), and the acoustical metric
/// is further normalized so that (g^-1)^00 = -1.
struct FluidModel {
  Lagrangian lag;
  double k = 1.0;
  double cbar = 1.0;  // background sound speed in the original coordinates
  double sigma_lo = 0.25;
  double sigma_hi = 4.0;
  bool rescaled = false;

  double kprime() const { return rescaled ? k / cbar : k; }
  /// Coefficient of -dt^2 in the background metric of the active coordinates.
  double time_scale() const { return rescaled ? cbar : 1.0; }
};

FluidModel make_fluid_model(const Lagrangian& lag, double k);
FluidModel rescale_coordinates(const FluidModel& fm);

/// sigma = -(m^-1)(dPhi, dPhi); FluidValidity if not positive.
double sigma(const Vec3& dPhi, const Mat3& minkowski);

/// F = 2 L''/L' and its sigma derivative.
double fluid_F(const Lagrangian& lag, double sigma);
double fluid_dF(const Lagrangian& lag, double sigma);

/// Sound speed in the model's active coordinates (divided by cbar when rescaled).
double sound_speed(const FluidModel& fm, double sigma);

struct AcousticalPair {
  Mat3 g;
  Mat3 ginv;
};
/// Original coordinates: g = m + H dPhi dPhi. Rescaled model: the metric in
/// rescaled coordinates, normalized to (g^-1)^00 = -1.
AcousticalPair acoustical_metric(const FluidModel& fm, const Vec3& dPhi);

struct PhysicalityReport {
  bool pass = true;
  std::string first_violation;  // empty when pass
  double sigma_at = 0.0;
};
PhysicalityReport physicality_check(const Lagrangian& lag, double sigma_lo, double sigma_hi);

/// Metric derivatives with respect to the wave variables Psi_lambda.
struct SystemEval {
  Mat3 g, ginv;
  std::array<Mat3, 3> G;       // G[lambda](mu, nu) = d g_{mu nu} / d Psi_lambda
  std::array<Mat3, 3> Graise;  // Graise[mu](alpha, beta) = G^{mu alpha beta}
  Vec3 Omega;                  // d ln sqrt|det g| / d Psi_lambda
  double symmetry_defect = 0.0;          // max |G^{mab} - G^{bam}| for g itself
  double hessian_symmetry_defect = 0.0;  // same for the Lagrangian Hessian
};
/// Psi_vec = (Psi0, Psi1, Psi2) in the model's active coordinates.
SystemEval system_G(const FluidModel& fm, const Vec3& Psi_vec);

/// Quadratic source of the system. dPsi_vec(beta, alpha) = d_beta Psi_alpha;
/// dPsi is the gradient of the component being evolved.
double null_form_Q(const SystemEval& sys, const Mat3& dPsi_vec, const Vec3& dPsi);

/// L mu for the first-order system. dslash_Psi_vec holds derivatives of each
/// Psi_lambda along the unit torus vector theta_hat (zero in plane symmetry).
double system_mu_transport_rhs(const SystemEval& sys, const FrameState& frame, const Vec3& L_Psi_vec,
                               const Vec3& Xbreve_Psi_vec, const Vec3& dslash_Psi_vec = Vec3::Zero(),
                               const Vec2& theta_hat = Vec2(0.0, 1.0));

// ---------------------------------------------------------------------------
// Plane-symmetric algebra in rescaled coordinates.

struct PlaneSpeeds {
  double plus = 1.0;   // L = d_t' + plus d_x'
  double minus = 1.0;  // Lbar = d_t' - minus d_x'
};
PlaneSpeeds characteristic_speeds(const FluidModel& fm, double Psi0p, double Psi1p);

/// Plane frame L, X = (Lbar - L)/2 with mu supplied by the caller.
FrameState plane_frame(const PlaneSpeeds& sp, double mu);

/// (R-, R+) with R- constant along Lbar and R+ constant along L.
std::pair<double, double> riemann_invariants(const FluidModel& fm, double Psi0p, double Psi1p);
/// Inverse of riemann_invariants.
std::pair<double, double> reconstruct_psi(const FluidModel& fm, double Rminus, double Rplus);
/// d(Psi0', Psi1') / d(R-, R+) as rows (Psi0', Psi1') and columns (R-, R+).
Mat2 reconstruct_jacobian(const FluidModel& fm, double Rminus, double Rplus);

/// (1/cbar) int_k^{sqrt sigma} ds / (c_s'(s) s), closed form for power laws.
double enthalpy_integral(const FluidModel& fm, double sqrt_sigma);
/// Same integral by adaptive Gauss-Kronrod quadrature (test oracle).
double enthalpy_integral_quadrature(const FluidModel& fm, double sqrt_sigma);

struct BumpSpec {
  double center = 0.5;
  double width = 0.0;  // <= 0: choose from eps0 / delta0
};

struct HierarchyData {
  std::vector<double> x;
  std::vector<double> Rminus, Rplus, Psi0p, Psi1p;
  double eps0 = 0, delta0 = 0, width = 0, center = 0;
  double max_dR = 0, max_d2R = 0, max_d3R = 0;  // derivative scales of R+
  double delta_star = 0;
  double cancellation_ratio = 0;  // max |Xbreve(Psi0' + Psi1')| / eps0
};

/// R- = 0 and R+ = eps0 B((x - center)/w) sampled on x. delta_star comes from
/// the transversal part of the system mu transport on the initial slice.
/// HierarchyUnsatisfied when the cancellation ratio exceeds 10.
HierarchyData build_hierarchy_data(const FluidModel& fm_rescaled, double eps0, double delta0,
                                   const BumpSpec& profile, const std::vector<double>& x);

/// Pointwise initial-slice quantities for R- = 0, R+ = r with dR+/dx = dr:
/// mu0 and the transversal mu-transport rate.
std::pair<double, double> plane_initial_mu_rate(const FluidModel& fm, double r, double dr);

}  // namespace shock
