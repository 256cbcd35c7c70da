#pragma once

#include <string>
#include <vector>

#include "shockform/model.hpp"
#include "shockform/profile.hpp"

namespace shock {

/// Rectangular grid on [x_min, x_max] x T with T = R/Z. Index i runs along
/// x1 (nx nodes including both ends), j along x2 (ny periodic nodes).
struct Grid2D {
  int nx = 0, ny = 0;
  double x_min = 0.0, x_max = 1.0;
  double dx = 0.0, dy = 0.0;

  std::size_t size() const { return static_cast<std::size_t>(nx) * ny; }
  std::size_t idx(int i, int j) const { return static_cast<std::size_t>(j) * nx + i; }
  double x1(int i) const { return x_min + dx * i; }
  double x2(int j) const { return dy * j; }
};

/// ValidationError on ny < 8, nx < 16 or a domain that cannot hold the
/// support cone up to t_max.
Grid2D make_grid(int nx, int ny, double x_min, double x_max, double t_max);

/// Initial data psi = P(1 - x1) (1 + eps cos(2 pi mode x2)), with
/// L psi = lpsi * P(1 - x1) / amplitude on the initial slice.
struct DataSpec {
  std::string kind = "zero";  // zero | simple_wave | hierarchy
  Profile profile;
  double delta_target = 0.0;  // > 0: amplitude chosen so that delta_star matches
  double eps = 0.0;
  int mode = 1;
  double lpsi = 0.0;
};

/// Psi, d_t Psi and the derivative of the unit-amplitude profile at a point.
struct DataPoint {
  double psi = 0.0, pi_shape = 0.0;
  double d1 = 0.0, d2 = 0.0;
};
DataPoint data_point(const DataSpec& spec, double x1, double x2);

/// delta_star of the data from G_LL Xbreve psi on a dense (u, theta) lattice
/// that does not depend on the evolution grid.
double initial_delta_star(const MetricModel& model, const DataSpec& spec);
/// Same lattice; also returns the location (u, theta) of the sup.
std::pair<double, std::pair<double, double>> initial_delta_star_at(const MetricModel& model,
                                                                   const DataSpec& spec);

/// Copy of spec with profile.amplitude solved for delta_target (no-op otherwise).
DataSpec resolve_amplitude(const MetricModel& model, const DataSpec& spec);

struct State2D {
  double t = 0.0;
  std::vector<double> psi, pi, u;
  std::vector<double> mu, L1, L2;  // derived from (psi, u) at time t
};

/// u = 1 - x1, psi from spec, pi from L psi = lpsi shape. SupportViolation
/// when psi or pi would be nonzero outside [0, 1] x T.
State2D init_state(const MetricModel& model, const DataSpec& spec, const Grid2D& grid);

struct SolverOptions {
  double t_max = 3.0;
  double cfl = 0.4;
  double mu_stop = 0.05;
  double mu_floor = 1e-4;
  double dissipation = 0.05;
  int eikonal_order = 3;     // 2: second-order upwind, 3: third-order upwind-biased
  int snapshot_stride = 0;  // 0: no intermediate snapshots
  std::string snapshot_dir;
  bool trace = true;         // integrate characteristics
  int char_stride = 4;       // steps between chars.csv records
  int probe_stride = 2;      // steps between identity-residual probes
  double probe_mu_min = 0.2;
  int n_seed_u = 7;
  int n_seed_theta = 2;
  double sat_factor = 4.0;  // satellite offset in units of dx
};

/// One explicit RK4 step of (psi, pi, u) without characteristics; refreshes
/// the derived fields. Exposed for tests.
void step(State2D& state, const MetricModel& model, const Grid2D& grid, double dt,
          double dissipation = 0.0, int eikonal_order = 3);

/// Largest stable time step CFL * min(dx, dy) / v_max at the given state.
double cfl_time_step(const State2D& state, const MetricModel& model, const Grid2D& grid, double cfl);

struct SeriesRow {
  double t = 0.0;
  double mu_star = 1.0;
  double max_abs_d1psi = 0.0;
  double max_abs_LPsi = 0.0;
  double max_abs_d2psi = 0.0;
  double argmin_x1 = 0.0;
  double argmin_x2 = 0.0;
  double xbreve_psi_at_min = 0.0;  // mu |X psi| at the argmin
  double max_Lmu_low = 0.0;        // max of L mu over points with mu <= 1/4 (NaN if none)
  long n_low = 0;
};

/// One record of a characteristic. role: 0 center, 1/2 u +/- offset,
/// 3/4 theta +/- offset.
struct CharRecord {
  int id = 0;
  int role = 0;
  double u0 = 0.0, theta0 = 0.0;
  double t = 0.0, x1 = 0.0, x2 = 0.0;
  double mu_char = 1.0, upsilon = 1.0;
  double psi = 0.0, mu_field = 1.0, u_field = 0.0;
};

/// Identity residual maxima at one probe time.
struct ResidualRow {
  double t = 0.0;
  double mu_star = 1.0;
  double eikonal = 0.0;
  double g_LL = 0.0, g_XX = 0.0, g_LX = 0.0;
  double mu_inv_sq = 0.0;
  double mu_du_X = 0.0;
  double transport = 0.0;
  double lnupsilon_trchi = 0.0;
  double jacobian = 0.0;
  double char_u = 0.0;
};

struct RunResult {
  Grid2D grid;
  std::vector<SeriesRow> series;
  std::vector<CharRecord> chars;
  std::vector<ResidualRow> residuals;
  double seed_offset = 0.0;  // label offset of the satellites
  std::string status;        // shocked | t_max
  State2D final_state;
  double delta_star = 0.0;
  long steps = 0;
};

/// Evolves to t_max or until mu_star <= mu_stop.
RunResult run(const MetricModel& model, const DataSpec& spec, const Grid2D& grid,
              const SolverOptions& opt);

/// Writes snapshot_NNNNNN.csv (x1, x2, psi, pi, u, mu).
void write_snapshot(const std::string& path, const Grid2D& grid, const State2D& s);

}  // namespace shock
