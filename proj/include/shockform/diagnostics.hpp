#pragma once

#include <limits>
#include <map>
#include <string>
#include <vector>

#include "shockform/artifacts.hpp"

namespace shock {

enum class Verdict { Pass, Fail, Vacuous };
std::string verdict_name(Verdict v);

/// Fit windows and tolerances. NaN tolerances take their documented defaults.
struct DiagnosticsOptions {
  double fit_lo = 0.1, fit_hi = 0.9;
  double mu_stop = 0.05;
  double tol_lifespan = std::numeric_limits<double>::quiet_NaN();  // default 10 eps0 + 5 dx
  double tail_hi = 0.5;
  int tail_min_samples = 32;
  double rate_lo = 0.85, rate_hi = 1.15;
  double product_variation = 0.2;
  double product_floor = 0.8;
  double trigger_fraction = 0.125;
  double regularity_max = 3.0;
  double growth_min = 10.0;
  double c_prop = 5.0;
  double residual_mu_min = 0.2;
  double ratio_lo = 2.5, ratio_hi = 6.0;
  double residual_floor = 1e-12;
};

/// Scalars of a run that the tables do not carry.
struct RunInfo {
  std::string status;     // shocked | t_max
  std::string data_kind;  // zero | simple_wave | hierarchy
  double delta_star = 0.0;
  double eps0 = 0.0;
  double dx = 0.0;
  double G_LL0 = 0.0;  // G(L_flat, L_flat) at psi = 0
};

struct MuFit {
  bool ok = false;
  double kappa = 0.0;
  double offset = 0.0;    // a in mu_star ~ a (1 - kappa t)
  double residual = 0.0;  // max relative deviation in the window
  int n = 0;
};

/// Least squares mu_star ~ a (1 - kappa t) over lo <= mu_star <= hi.
MuFit fit_mu_star(const std::vector<double>& t, const std::vector<double>& mu_star, double lo = 0.1,
                  double hi = 0.9);
MuFit fit_mu_star(const std::vector<SeriesRow>& series, double lo = 0.1, double hi = 0.9);

/// 1 / kappa of the fit, NaN when the fit is rejected.
double lifespan_from_fit(const MuFit& fit);

Verdict lifespan_check(double t_lifespan, double delta_star, double tol);

struct RateResult {
  Verdict verdict = Verdict::Vacuous;
  int n = 0;
  double exponent = std::numeric_limits<double>::quiet_NaN();
  double T_fit = std::numeric_limits<double>::quiet_NaN();
  double product_min = std::numeric_limits<double>::quiet_NaN();
  double product_max = std::numeric_limits<double>::quiet_NaN();
  double product_floor = 0.0;
  bool rate_ok = true, product_ok = true, floor_ok = true;
  Verdict trigger = Verdict::Vacuous;
  double trigger_worst = std::numeric_limits<double>::quiet_NaN();  // max L mu over mu <= 1/4
};

/// Exponent p of max |d_1 psi| ~ (T - t)^(-p) with T fitted, the range of
/// mu |X psi| at the mu argmin, and the point-of-no-return trigger.
RateResult blowup_rate_check(const std::vector<SeriesRow>& series, const RunInfo& info,
                             const DiagnosticsOptions& opt);

/// Least-squares exponent of y ~ C (T - t)^(-p), minimizing over T > t.back().
struct PowerFit {
  double p = 0.0, T = 0.0, rss = 0.0;
};
PowerFit fit_power_blowup(const std::vector<double>& t, const std::vector<double>& y);

struct RegularityResult {
  Verdict verdict = Verdict::Vacuous;
  double ratio = std::numeric_limits<double>::quiet_NaN();
  double growth = std::numeric_limits<double>::quiet_NaN();  // max |d_1 psi| final / initial
  double initial = 0.0;
  double peak = 0.0;
};

/// Derivatives of psi in the geometric chart from the traced characteristics:
/// d/dt along each center curve, d/du and d/dtheta across its satellites.
RegularityResult geometric_regularity_check(const std::vector<CharRecord>& chars,
                                            const std::vector<SeriesRow>& series, double t_lifespan,
                                            const RunInfo& info, const DiagnosticsOptions& opt);

struct SmallnessResult {
  Verdict verdict = Verdict::Vacuous;
  double max_LPsi = 0.0, max_d2psi = 0.0, bound = 0.0;
};
SmallnessResult smallness_propagation_check(const std::vector<SeriesRow>& series, double eps0,
                                            double t_lifespan, double c_prop);

struct BlowupPoint {
  double u, theta, x1, x2;
};
/// Center characteristics whose field mu ends at or below 2 mu_stop.
std::vector<BlowupPoint> blowup_points(const std::vector<CharRecord>& chars, double mu_stop);

/// Max of each identity over rows with mu_star >= mu_min.
std::map<std::string, double> residual_maxima(const std::vector<ResidualRow>& rows, double mu_min);

struct ResidualEntry {
  std::string name;
  double coarse = 0.0, fine = 0.0, ratio = 0.0;
  Verdict verdict = Verdict::Vacuous;
};
/// Convergence ratios coarse / fine of the identity maxima. Identities below
/// the floor at both resolutions are skipped (vacuous).
std::vector<ResidualEntry> residual_convergence_suite(const std::vector<ResidualRow>& coarse,
                                                      const std::vector<ResidualRow>& fine,
                                                      const DiagnosticsOptions& opt);
/// Identities checked by the convergence suite.
const std::vector<std::string>& convergence_identities();

struct ShockReport {
  std::string status;
  double t_lifespan_num = std::numeric_limits<double>::quiet_NaN();
  double delta_star = 0.0;
  double kappa_fit = 0.0;
  double kappa_offset = 0.0;
  double kappa_residual = 0.0;
  std::vector<BlowupPoint> blowup_points;
  RateResult rate;
  RegularityResult regularity;
  SmallnessResult smallness;
  std::map<std::string, double> residual_table;
  Verdict lifespan = Verdict::Vacuous;
  double tol_lifespan = 0.0;

  /// Fail if any verdict failed.
  bool passed() const;
};

/// Report as a pure function of the stored tables and run info.
ShockReport build_report(const RunTables& tables, const RunInfo& info, const DiagnosticsOptions& opt);

/// Pretty-printed JSON with a fixed key order; NaN written as null.
std::string report_json(const ShockReport& r);

/// run_info.json round trip.
std::string run_info_json(const RunInfo& info);
RunInfo parse_run_info(const std::string& text);

}  // namespace shock
