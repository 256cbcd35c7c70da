#include "shockform/commands.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "shockform/errors.hpp"
#include "shockform/io.hpp"
#include "shockform/plane.hpp"

namespace shock {

namespace {

using ojson = nlohmann::ordered_json;

ojson real(double v) { return std::isfinite(v) ? ojson(v) : ojson(nullptr); }

FluidModel euler_model(const EulerConfig& e) {
  return rescale_coordinates(make_fluid_model(power_lagrangian(e.s), e.k));
}

std::vector<double> euler_grid(const EulerConfig& e) {
  std::vector<double> x(e.n);
  const double h = (e.x_max - e.x_min) / (e.n - 1);
  for (int i = 0; i < e.n; ++i) x[i] = e.x_min + i * h;
  return x;
}

SimulateOutcome simulate_into(const RunConfig& cfg, const std::string& out) {
  ensure_directory(out);
  write_text_file(out + "/config_resolved.json", resolved_config_json(cfg));
  const MetricModel model = build_model(cfg.model);
  const Grid2D grid = build_grid(cfg);
  SolverOptions opt = cfg.run;
  if (cfg.output.stride > 0) {
    opt.snapshot_stride = cfg.output.stride;
    opt.snapshot_dir = out + "/snapshots";
    ensure_directory(opt.snapshot_dir);
  }
  const RunResult res = run(model, cfg.data, grid, opt);
  write_tables(out, RunTables{res.series, res.chars, res.residuals});

  SimulateOutcome o;
  o.info = RunInfo{res.status, cfg.data.kind, res.delta_star, cfg.data.eps, grid.dx,
                   genuine_nonlinearity_coefficient(model)};
  write_text_file(out + "/run_info.json", run_info_json(o.info));
  // The report is built from what was written, so verify sees the same inputs.
  o.report = build_report(read_tables(out), o.info, cfg.diagnostics);
  write_text_file(out + "/shock_report.json", report_json(o.report));
  o.exit_code = o.report.passed() ? kExitOk : kExitVerdictFail;
  return o;
}

}  // namespace

std::string resolve_output_dir(const std::string& flag, const RunConfig& cfg) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("SHOCK_OUT"); env && *env) return env;
  return cfg.output.dir;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(Errc::ValidationError, path + ": cannot write");
  f << text;
}

std::string read_text_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(Errc::ParseError, path + ": cannot open");
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

SimulateOutcome simulate_command(const RunConfig& cfg, const std::string& out) { return simulate_into(cfg, out); }

VerifyOutcome verify_command(const std::string& dir) {
  const RunConfig cfg = parse_config_file(dir + "/config_resolved.json");
  const RunInfo info = parse_run_info(read_text_file(dir + "/run_info.json"));
  const ShockReport rep = build_report(read_tables(dir), info, cfg.diagnostics);
  VerifyOutcome o;
  o.report = report_json(rep);
  o.reproduced = o.report == read_text_file(dir + "/shock_report.json");
  o.passed = rep.passed();
  o.exit_code = o.reproduced && o.passed ? kExitOk : kExitVerdictFail;
  return o;
}

PlaneOutcome plane_command(const RunConfig& cfg, const std::string& out) {
  ensure_directory(out);
  write_text_file(out + "/config_resolved.json", resolved_config_json(cfg));
  PlaneOutcome o;
  const MetricModel model = build_model(cfg.model);
  const DataSpec data = resolve_amplitude(model, cfg.data);
  SimpleWaveData sw;
  sw.profile = data.profile;
  if (data.kind == "zero") sw.profile.amplitude = 0.0;
  sw.n_u = cfg.plane.n_u;

  ojson rep;
  CharacteristicFan fan;
  bool have_fan = false;
  try {
    fan = simple_wave_fan(model, sw);
    have_fan = true;
  } catch (const Error& e) {
    if (e.code() != Errc::NoShockPredicted) throw;
  }
  double t_end = cfg.run.t_max;
  o.status = "no_shock";
  if (have_fan) {
    CsvWriter w(out + "/fan.csv", {"u", "x0", "slope", "mu0", "coeff"});
    for (std::size_t k = 0; k < fan.u.size(); ++k)
      w.row({fan.u[k], fan.x0[k], fan.slope[k], fan.mu0[k], fan.coeff[k]});
    o.delta_star = fan_delta_star(fan);
    try {
      const BlowupPrediction bp = simple_wave_blowup_time(fan);
      o.status = "shocked";
      o.T = bp.T;
      o.u = bp.u;
      t_end = bp.T;
    } catch (const Error& e) {
      if (e.code() != Errc::NoShockPredicted) throw;
    }
    const auto series = simple_wave_series(fan, t_end, cfg.plane.n_t);
    CsvWriter ws(out + "/plane_series.csv", {"t", "mu_star", "max_abs_dxpsi"});
    std::vector<double> ts, mus;
    for (const auto& s : series) {
      ws.row({s.t, s.mu_star, s.max_abs_dxpsi});
      ts.push_back(s.t);
      mus.push_back(s.mu_star);
    }
    if (o.status == "shocked") {
      const MuFit fit = fit_mu_star(ts, mus, cfg.diagnostics.fit_lo, cfg.diagnostics.fit_hi);
      o.kappa = fit.kappa;
      o.fit_residual = fit.residual;
    }
  }
  rep["status"] = o.status;
  rep["blowup_time"] = o.status == "shocked" ? real(o.T) : ojson(nullptr);
  rep["blowup_u"] = o.status == "shocked" ? real(o.u) : ojson(nullptr);
  rep["delta_star"] = real(o.delta_star);
  rep["kappa_fit"] = real(o.kappa);
  rep["kappa_residual"] = real(o.fit_residual);

  if (cfg.plane.riemann) {
    const EulerConfig& e = cfg.euler;
    const FluidModel fm = euler_model(e);
    const HierarchyData hd = build_hierarchy_data(fm, e.eps0, e.delta0, e.bump, euler_grid(e));
    RiemannOptions ro;
    ro.x_min = e.x_min;
    ro.x_max = e.x_max;
    ro.n = e.n;
    ro.t_max = e.t_max;
    ro.mu_stop = e.mu_stop;
    ro.cfl = e.cfl;
    ro.n_markers = e.n_markers;
    ro.dRplus_dx = hierarchy_slope(hd);
    const RiemannResult rr = riemann_solve(fm, hd.Rminus, hd.Rplus, ro);
    CsvWriter w(out + "/riemann_series.csv", {"t", "mu_star", "max_abs_dxpsi", "drift", "max_abs_rminus"});
    for (const auto& s : rr.series) w.row({s.t, s.mu_star, s.max_abs_dxpsi, s.drift, s.max_abs_rminus});
    o.riemann = true;
    o.riemann_lifespan = rr.shocked ? rr.t_lifespan : std::numeric_limits<double>::quiet_NaN();
    o.riemann_delta_star = hd.delta_star;
    const double product = o.riemann_lifespan * hd.delta_star;
    const bool ok = rr.shocked && std::abs(product - 1.0) <= 0.1;
    rep["riemann"] = ojson{{"status", rr.shocked ? "shocked" : "t_max"},
                           {"t_lifespan", real(o.riemann_lifespan)},
                           {"delta_star", real(hd.delta_star)},
                           {"lifespan_product", real(product)},
                           {"predicted_time", real(euler_blowup_time(fm, hd).T)},
                           {"drift_rate", real(rr.drift_rate)},
                           {"max_abs_rminus", real(rr.max_abs_rminus)},
                           {"verdict", ok ? "pass" : "fail"}};
    if (!ok) o.exit_code = kExitVerdictFail;
  }
  write_text_file(out + "/plane_report.json", rep.dump(2) + "\n");
  return o;
}

EulerDataOutcome euler_data_command(const RunConfig& cfg, const std::string& out) {
  ensure_directory(out);
  write_text_file(out + "/config_resolved.json", resolved_config_json(cfg));
  const EulerConfig& e = cfg.euler;
  const FluidModel fm0 = make_fluid_model(power_lagrangian(e.s), e.k);
  const FluidModel fm = rescale_coordinates(fm0);
  EulerDataOutcome o;
  const PhysicalityReport phys = physicality_check(fm0.lag, fm0.sigma_lo, fm0.sigma_hi);
  o.physical = phys.pass;
  const double cs_exact = 1.0 / std::sqrt(1.0 + 2.0 * e.s);
  for (int k = 0; k <= 64; ++k) {
    const double sig = fm0.sigma_lo + (fm0.sigma_hi - fm0.sigma_lo) * k / 64.0;
    o.max_sound_speed_error = std::max(o.max_sound_speed_error, std::abs(sound_speed(fm0, sig) - cs_exact));
  }
  o.data = build_hierarchy_data(fm, e.eps0, e.delta0, e.bump, euler_grid(e));
  const HierarchyData& d = o.data;
  {
    CsvWriter w(out + "/euler_data.csv", {"x", "Rminus", "Rplus", "Psi0p", "Psi1p"});
    for (std::size_t i = 0; i < d.x.size(); ++i) w.row({d.x[i], d.Rminus[i], d.Rplus[i], d.Psi0p[i], d.Psi1p[i]});
  }
  double T = std::numeric_limits<double>::quiet_NaN();
  if (e.eps0 > 0.0) T = euler_blowup_time(fm, d).T;
  ojson rep;
  rep["s"] = real(e.s);
  rep["k"] = real(e.k);
  rep["cbar"] = real(fm.cbar);
  rep["sound_speed"] = real(cs_exact);
  rep["max_sound_speed_error"] = real(o.max_sound_speed_error);
  rep["physicality"] = ojson{{"pass", phys.pass}, {"first_violation", phys.first_violation}};
  rep["eps0"] = real(d.eps0);
  rep["delta0"] = real(d.delta0);
  rep["width"] = real(d.width);
  rep["center"] = real(d.center);
  rep["max_dR"] = real(d.max_dR);
  rep["max_d2R"] = real(d.max_d2R);
  rep["max_d3R"] = real(d.max_d3R);
  rep["delta_star"] = real(d.delta_star);
  rep["cancellation_ratio"] = real(d.cancellation_ratio);
  rep["predicted_time"] = real(T);
  rep["predicted_product"] = real(T * d.delta_star);
  write_text_file(out + "/hierarchy_report.json", rep.dump(2) + "\n");
  o.exit_code = phys.pass ? kExitOk : kExitVerdictFail;
  return o;
}

ConvergenceOutcome convergence_command(const RunConfig& cfg, const std::string& out) {
  ensure_directory(out);
  RunConfig coarse = cfg;
  coarse.run.dissipation = 0.0;
  RunConfig fine = coarse;
  fine.grid.nx = 2 * cfg.grid.nx;
  fine.grid.ny = 2 * cfg.grid.ny;
  simulate_into(coarse, out + "/coarse");
  simulate_into(fine, out + "/fine");
  ConvergenceOutcome o;
  o.suite = residual_convergence_suite(read_residuals(out + "/coarse/residuals.csv"),
                                       read_residuals(out + "/fine/residuals.csv"), cfg.diagnostics);
  ojson rows = ojson::array();
  for (const auto& r : o.suite) {
    rows.push_back(ojson{{"identity", r.name},
                         {"coarse", real(r.coarse)},
                         {"fine", real(r.fine)},
                         {"ratio", real(r.ratio)},
                         {"verdict", verdict_name(r.verdict)}});
    if (r.verdict == Verdict::Fail) o.exit_code = kExitVerdictFail;
  }
  ojson rep;
  rep["nx"] = ojson::array({cfg.grid.nx, fine.grid.nx});
  rep["ny"] = ojson::array({cfg.grid.ny, fine.grid.ny});
  rep["mu_min"] = real(cfg.diagnostics.residual_mu_min);
  rep["identities"] = rows;
  write_text_file(out + "/residual_convergence.json", rep.dump(2) + "\n");
  return o;
}

}  // namespace shock
