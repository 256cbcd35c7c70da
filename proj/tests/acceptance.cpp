// Acceptance suite: one PASS/FAIL line per criterion, details in
// acceptance_report.json. Usage: acceptance <config dir> <work dir>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <string>
#include <vector>

#include <json.hpp>

#include "shockform/commands.hpp"
#include "shockform/config.hpp"
#include "shockform/euler.hpp"
#include "shockform/plane.hpp"

using namespace shock;
namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

// Tolerances of the criteria.
constexpr double kLifespanTol2048 = 0.02;
constexpr double kLifespanTol8192 = 0.005;
constexpr double kRuntime2048 = 60.0;
constexpr double kConvLo = 3.0, kConvHi = 5.0;
constexpr double kMu0Tol = 1e-3;
constexpr double kFanResidual = 1e-10;
constexpr double kGridResidual = 0.05;
constexpr double kKappaRel = 0.1;
constexpr double kProductTol = 0.1;
constexpr double kSoundSpeedTol = 1e-12;
constexpr double kDriftLo = 3.0, kDriftHi = 6.0;
constexpr double kRminusTol = 1e-12;

struct Run {
  std::string name;
  std::string dir;
  SimulateOutcome out;
  double seconds = 0.0;
  bool shocked() const { return out.report.status == "shocked"; }
};

ojson real(double v) { return std::isfinite(v) ? ojson(v) : ojson(nullptr); }

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

class Suite {
 public:
  explicit Suite(std::string work) : work_(std::move(work)) { fs::create_directories(work_); }

  Run simulate(const std::string& name, RunConfig cfg) {
    Run r;
    r.name = name;
    r.dir = work_ + "/" + name;
    std::fprintf(stderr, "  running %s (nx %d, ny %d)\n", name.c_str(), cfg.grid.nx, cfg.grid.ny);
    const auto t0 = std::chrono::steady_clock::now();
    r.out = simulate_command(cfg, r.dir);
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    runs_.push_back(r);
    return r;
  }

  /// Adopts a run already written to dir.
  Run load(const std::string& name, const std::string& dir, const RunConfig& cfg) {
    Run r;
    r.name = name;
    r.dir = dir;
    r.out.info = parse_run_info(read_text_file(dir + "/run_info.json"));
    r.out.report = build_report(read_tables(dir), r.out.info, cfg.diagnostics);
    runs_.push_back(r);
    return r;
  }

  void record(int id, bool pass, const std::string& summary, ojson detail) {
    std::printf("criterion %2d: %s  %s\n", id, pass ? "PASS" : "FAIL", summary.c_str());
    std::fflush(stdout);
    detail["pass"] = pass;
    report_[std::to_string(id)] = detail;
    all_ &= pass;
  }

  const std::vector<Run>& runs() const { return runs_; }
  const std::string& work() const { return work_; }
  bool all() const { return all_; }

  void write() const {
    std::ofstream(work_ + "/acceptance_report.json") << report_.dump(2) << "\n";
  }

 private:
  std::string work_;
  std::vector<Run> runs_;
  ojson report_ = ojson::object();
  bool all_ = true;
};

RunConfig with_grid(RunConfig c, int nx, int ny) {
  c.grid.nx = nx;
  c.grid.ny = ny;
  c.grid.x_max = c.grid.x_min + 1.1 + 2.0 * c.run.t_max;
  return c;
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> x(n);
  for (int i = 0; i < n; ++i) x[i] = a + (b - a) * i / (n - 1);
  return x;
}

bool same_bytes(const std::string& a, const std::string& b) {
  std::ifstream fa(a, std::ios::binary), fb(b, std::ios::binary);
  if (!fa || !fb) return false;
  return std::equal(std::istreambuf_iterator<char>(fa), {}, std::istreambuf_iterator<char>(fb), {});
}

ojson run_json(const Run& r) {
  const ShockReport& s = r.out.report;
  return ojson{{"dir", r.dir},
               {"status", s.status},
               {"seconds", real(r.seconds)},
               {"t_lifespan", real(s.t_lifespan_num)},
               {"delta_star", real(s.delta_star)},
               {"kappa_fit", real(s.kappa_fit)},
               {"kappa_residual", real(s.kappa_residual)},
               {"rate_exponent", real(s.rate.exponent)},
               {"product_range", ojson::array({real(s.rate.product_min), real(s.rate.product_max)})},
               {"trigger_max_Lmu", real(s.rate.trigger_worst)},
               {"regularity_ratio", real(s.regularity.ratio)},
               {"d1psi_growth", real(s.regularity.growth)},
               {"max_LPsi", real(s.smallness.max_LPsi)},
               {"max_d2psi", real(s.smallness.max_d2psi)}};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) {
    std::fprintf(stderr, "usage: %s <config dir> <work dir>\n", argv[0]);
    return 1;
  }
  const std::string configs = argv[1];
  Suite suite(argv[2]);

  const RunConfig simple = parse_config_file(configs + "/simple_wave.json");
  const RunConfig hierarchy = parse_config_file(configs + "/hierarchy.json");
  const RunConfig euler = parse_config_file(configs + "/euler.json");

  // Simple-wave ladder.
  const Run sw2048 = suite.simulate("simple_2048", with_grid(simple, 2048, 8));
  const Run sw4096 = suite.simulate("simple_4096", with_grid(simple, 4096, 8));
  const Run sw8192 = suite.simulate("simple_8192", with_grid(simple, 8192, 8));

  // Hierarchy data: refinement pair without dissipation, then a fine run.
  const RunConfig hpair = with_grid(hierarchy, 1024, 8);
  std::fprintf(stderr, "  running hierarchy convergence pair (nx 1024/2048)\n");
  const ConvergenceOutcome conv = convergence_command(hpair, suite.work() + "/hierarchy_pair");
  const std::string pair = suite.work() + "/hierarchy_pair";
  suite.load("hierarchy_1024", pair + "/coarse", hpair);
  const Run h2048 = suite.load("hierarchy_2048", pair + "/fine", hpair);
  const Run h8192 = suite.simulate("hierarchy_8192", with_grid(hierarchy, 8192, 8));

  // 1. Simple-wave shock time against the fan oracle.
  {
    const MetricModel model = build_model(simple.model);
    const DataSpec data = resolve_amplitude(model, simple.data);
    const CharacteristicFan fan = simple_wave_fan(model, SimpleWaveData{data.profile, simple.plane.n_u});
    const double T = simple_wave_blowup_time(fan).T;
    double mu0_dev = 0.0;
    for (double v : fan.mu0) mu0_dev = std::max(mu0_dev, std::abs(v - 1.0));
    auto err = [&](const Run& r) { return std::abs(r.out.report.t_lifespan_num / T - 1.0); };
    const double e1 = err(sw2048), e2 = err(sw4096), e3 = err(sw8192);
    const double ratio = e1 / e2, ratio_fine = e2 / e3;
    const double delta = sw2048.out.report.delta_star;
    const bool pass = std::abs(delta - 0.5) <= kMu0Tol && mu0_dev <= kMu0Tol && e1 <= kLifespanTol2048 &&
                      e3 <= kLifespanTol8192 && ratio >= kConvLo && ratio <= kConvHi &&
                      sw2048.seconds <= kRuntime2048;
    suite.record(1, pass,
                 "err 2048 " + fmt("%.4f", e1) + ", 8192 " + fmt("%.5f", e3) + ", ratio " + fmt("%.2f", ratio) +
                     " (next " + fmt("%.2f", ratio_fine) + "), " + fmt("%.1f", sw2048.seconds) + " s",
                 ojson{{"T_oracle", T},
                       {"delta_star", delta},
                       {"mu0_max_dev", mu0_dev},
                       {"errors", ojson::array({e1, e2, e3})},
                       {"ratio_2048_4096", ratio},
                       {"ratio_4096_8192", ratio_fine},
                       {"runtime_2048", sw2048.seconds}});
  }

  // 2. Linear vanishing of mu_star: fan path and grid path.
  {
    const MetricModel model = build_model(simple.model);
    const DataSpec data = resolve_amplitude(model, simple.data);
    const CharacteristicFan fan = simple_wave_fan(model, SimpleWaveData{data.profile, simple.plane.n_u});
    const double d = fan_delta_star(fan);
    const auto series = simple_wave_series(fan, simple_wave_blowup_time(fan).T, simple.plane.n_t);
    std::vector<double> t, mu;
    for (const auto& s : series) {
      t.push_back(s.t);
      mu.push_back(s.mu_star);
    }
    const MuFit f = fit_mu_star(t, mu, simple.diagnostics.fit_lo, simple.diagnostics.fit_hi);
    const ShockReport& g = h8192.out.report;
    const double rel = std::abs(g.kappa_fit / g.delta_star - 1.0);
    const bool pass = f.ok && f.residual <= kFanResidual && std::abs(f.kappa - d) <= kFanResidual * d &&
                      g.kappa_residual <= kGridResidual && rel <= kKappaRel;
    suite.record(2, pass,
                 "fan residual " + fmt("%.1e", f.residual) + ", grid residual " + fmt("%.4f", g.kappa_residual) +
                     ", |kappa/delta - 1| " + fmt("%.4f", rel),
                 ojson{{"fan_kappa", f.kappa},
                       {"fan_delta_star", d},
                       {"fan_residual", f.residual},
                       {"grid_run", h8192.name},
                       {"grid_kappa", g.kappa_fit},
                       {"grid_residual", g.kappa_residual},
                       {"grid_kappa_rel", rel},
                       {"hierarchy_2048", run_json(h2048)}});
  }

  // 3. Lifespan formula on hierarchy data.
  {
    auto dev = [](const Run& r) { return std::abs(r.out.report.t_lifespan_num * r.out.report.delta_star - 1.0); };
    const double a = dev(h2048), b = dev(h8192);
    const bool pass = h2048.shocked() && h8192.shocked() && a <= kProductTol && b < a;
    suite.record(3, pass, "|t delta - 1| 2048 " + fmt("%.4f", a) + ", 8192 " + fmt("%.4f", b),
                 ojson{{"dev_2048", real(a)}, {"dev_8192", real(b)}});
  }

  // 4. 1/mu blowup on the finest simple-wave run.
  {
    const RateResult& r = sw8192.out.report.rate;
    const double var = (r.product_max - r.product_min) / r.product_max;
    const bool pass = sw8192.shocked() && r.verdict == Verdict::Pass;
    suite.record(4, pass,
                 "p " + fmt("%.3f", r.exponent) + ", product variation " + fmt("%.3f", var) + ", min " +
                     fmt("%.4f", r.product_min) + " >= " + fmt("%.4f", r.product_floor),
                 ojson{{"run", sw8192.name},
                       {"exponent", real(r.exponent)},
                       {"product_variation", real(var)},
                       {"product_min", real(r.product_min)},
                       {"product_floor", r.product_floor},
                       {"samples", r.n},
                       {"coarser", ojson::array({run_json(sw2048), run_json(sw4096)})}});
  }

  // 5. Geometric regularity on every shocked run.
  {
    bool pass = true;
    int n = 0;
    double worst_ratio = 0.0, least_growth = INFINITY;
    ojson per = ojson::object();
    for (const Run& r : suite.runs()) {
      if (!r.shocked()) continue;
      ++n;
      const RegularityResult& g = r.out.report.regularity;
      pass &= g.verdict == Verdict::Pass;
      worst_ratio = std::max(worst_ratio, g.ratio);
      least_growth = std::min(least_growth, g.growth);
      per[r.name] = ojson{{"ratio", real(g.ratio)}, {"growth", real(g.growth)}};
    }
    pass &= n > 0;
    suite.record(5, pass,
                 std::to_string(n) + " shocked runs, worst ratio " + fmt("%.3f", worst_ratio) + ", least growth " +
                     fmt("%.1f", least_growth),
                 ojson{{"runs", per}});
  }

  // 6. Identity residual convergence.
  {
    bool pass = true;
    int active = 0;
    double lo = INFINITY, hi = 0.0;
    ojson rows = ojson::array();
    for (const auto& e : conv.suite) {
      rows.push_back(ojson{{"identity", e.name}, {"coarse", e.coarse}, {"fine", e.fine}, {"ratio", real(e.ratio)}});
      if (e.verdict == Verdict::Vacuous) continue;
      ++active;
      pass &= e.verdict == Verdict::Pass;
      lo = std::min(lo, e.ratio);
      hi = std::max(hi, e.ratio);
    }
    pass &= active > 0;
    suite.record(6, pass,
                 std::to_string(active) + " identities, ratios in [" + fmt("%.2f", lo) + ", " + fmt("%.2f", hi) + "]",
                 ojson{{"identities", rows}});
  }

  // 7. Euler.
  {
    bool cs_ok = true, phys_ok = true;
    double cs_err = 0.0;
    for (double s : {0.5, 1.0, 2.0}) {
      const FluidModel fm = make_fluid_model(power_lagrangian(s), euler.euler.k);
      for (int i = 0; i <= 200; ++i) {
        const double sg = fm.sigma_lo + (fm.sigma_hi - fm.sigma_lo) * i / 200.0;
        cs_err = std::max(cs_err, std::abs(sound_speed(fm, sg) - 1.0 / std::sqrt(1.0 + 2.0 * s)));
      }
      phys_ok &= physicality_check(fm.lag, fm.sigma_lo, fm.sigma_hi).pass;
    }
    cs_ok = cs_err <= kSoundSpeedTol;

    const FluidModel fm = rescale_coordinates(make_fluid_model(power_lagrangian(euler.euler.s), euler.euler.k));
    auto evolve = [&](int n, double x_max, double t_max) {
      const std::vector<double> x = linspace(euler.euler.x_min, x_max, n);
      const HierarchyData d = build_hierarchy_data(fm, euler.euler.eps0, euler.euler.delta0, euler.euler.bump, x);
      RiemannOptions o;
      o.x_min = euler.euler.x_min;
      o.x_max = x_max;
      o.n = n;
      o.t_max = t_max;
      o.mu_stop = euler.euler.mu_stop;
      o.cfl = euler.euler.cfl;
      o.n_markers = euler.euler.n_markers;
      o.dRplus_dx = hierarchy_slope(d);
      return std::make_pair(d, riemann_solve(fm, d.Rminus, d.Rplus, o));
    };
    // Drift before the shock on a short domain, at two resolutions.
    const auto [dc, rc] = evolve(1024, 2.5, 1.5);
    const auto [df, rf] = evolve(2048, 2.5, 1.5);
    const double drift_ratio = rc.drift_rate / rf.drift_rate;
    const double rminus = std::max(rc.max_abs_rminus, rf.max_abs_rminus);
    // Shock time with the measured delta_star.
    const auto [dl, rl] = evolve(euler.euler.n, euler.euler.x_max, euler.euler.t_max);
    const double dev = std::abs(rl.t_lifespan * dl.delta_star - 1.0);
    const bool pass = cs_ok && phys_ok && drift_ratio >= kDriftLo && drift_ratio <= kDriftHi &&
                      rminus <= kRminusTol && rl.shocked && dev <= kProductTol;
    suite.record(7, pass,
                 "c_s err " + fmt("%.1e", cs_err) + ", physical " + (phys_ok ? "yes" : "no") + ", drift ratio " +
                     fmt("%.2f", drift_ratio) + ", |R-| " + fmt("%.1e", rminus) + ", |t delta - 1| " +
                     fmt("%.4f", dev),
                 ojson{{"sound_speed_max_err", cs_err},
                       {"physicality", phys_ok},
                       {"drift_rate", ojson::array({rc.drift_rate, rf.drift_rate})},
                       {"drift_ratio", drift_ratio},
                       {"max_abs_rminus", rminus},
                       {"t_lifespan", rl.t_lifespan},
                       {"delta_star", dl.delta_star},
                       {"lifespan_dev", dev}});
  }

  // 8. Smallness propagation and its negative control.
  {
    const SmallnessResult& s = h8192.out.report.smallness;
    RunConfig neg = with_grid(hierarchy, 1024, 8);
    neg.data.lpsi = h8192.out.report.delta_star;
    const Run control = suite.simulate("negative_control", neg);
    const SmallnessResult& c = control.out.report.smallness;
    // The control must fail on the initial slice already.
    const SeriesRow& first = read_tables(control.dir).series.front();
    const bool control_fails = c.verdict == Verdict::Fail && first.max_abs_LPsi > c.bound;
    const bool pass = h8192.shocked() && s.verdict == Verdict::Pass && control_fails;
    suite.record(8, pass,
                 "max|L psi| " + fmt("%.4f", s.max_LPsi) + ", max|d2 psi| " + fmt("%.4f", s.max_d2psi) + " <= " +
                     fmt("%.3f", s.bound) + "; control " + (control_fails ? "fails" : "passes") + " (" +
                     fmt("%.3f", first.max_abs_LPsi) + " at t = 0)",
                 ojson{{"run", h8192.name},
                       {"max_LPsi", s.max_LPsi},
                       {"max_d2psi", s.max_d2psi},
                       {"bound", s.bound},
                       {"control_initial_LPsi", first.max_abs_LPsi},
                       {"control_verdict", verdict_name(c.verdict)},
                       {"hierarchy_2048", run_json(h2048)}});
  }

  // 9. Shock trigger on every shocked run.
  {
    bool pass = true;
    int n = 0;
    std::string failing;
    ojson per = ojson::object();
    for (const Run& r : suite.runs()) {
      if (!r.shocked()) continue;
      ++n;
      const RateResult& g = r.out.report.rate;
      const bool ok = g.trigger == Verdict::Pass;
      pass &= ok;
      if (!ok) failing += (failing.empty() ? "" : ", ") + r.name;
      per[r.name] = ojson{{"max_Lmu", real(g.trigger_worst)},
                          {"bound", -r.out.report.delta_star / 8.0},
                          {"verdict", verdict_name(g.trigger)}};
    }
    pass &= n > 0;
    suite.record(9, pass, std::to_string(n) + " shocked runs" + (failing.empty() ? "" : "; failing: " + failing),
                 ojson{{"runs", per}});
  }

  // 10. Reproducibility.
  {
    bool verified = true;
    for (const Run& r : suite.runs()) {
      const VerifyOutcome v = verify_command(r.dir);
      verified &= v.reproduced;
    }
    const std::string coarse = suite.work() + "/hierarchy_pair/coarse";
    const RunConfig again = parse_config_file(coarse + "/config_resolved.json");
    const std::string rerun = suite.work() + "/rerun";
    simulate_command(again, rerun);
    bool identical = true;
    for (const char* f : {"series.csv", "chars.csv", "residuals.csv", "shock_report.json"})
      identical &= same_bytes(coarse + "/" + f, rerun + "/" + f);
    suite.record(10, verified && identical,
                 std::string("verify ") + (verified ? "bit-exact" : "mismatch") + " on " +
                     std::to_string(suite.runs().size()) + " runs, rerun CSVs " +
                     (identical ? "identical" : "differ"),
                 ojson{{"verified", verified}, {"identical", identical}});
  }

  suite.write();
  std::printf("acceptance: %s\n", suite.all() ? "all criteria pass" : "some criteria fail");
  return suite.all() ? 0 : 1;
}
