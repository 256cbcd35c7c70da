#pragma once

#include <string>

#include "shockform/config.hpp"
#include "shockform/diagnostics.hpp"

namespace shock {

/// Process exit codes shared by every subcommand.
enum ExitCode : int { kExitOk = 0, kExitError = 1, kExitVerdictFail = 2 };

/// --out flag if given, else $SHOCK_OUT, else output.dir of the config.
std::string resolve_output_dir(const std::string& flag, const RunConfig& cfg);

void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

struct SimulateOutcome {
  ShockReport report;
  RunInfo info;
  int exit_code = kExitOk;
};
/// Full 2-D run. Writes config_resolved.json, series.csv, chars.csv,
/// residuals.csv, run_info.json and shock_report.json into out.
SimulateOutcome simulate_command(const RunConfig& cfg, const std::string& out);

struct VerifyOutcome {
  bool reproduced = false;  // recomputed report matches the stored bytes
  bool passed = false;
  std::string report;  // recomputed shock_report.json
  int exit_code = kExitOk;
};
/// Rebuilds the report from the CSVs and run_info.json in dir.
VerifyOutcome verify_command(const std::string& dir);

struct PlaneOutcome {
  std::string status;  // shocked | no_shock
  double T = 0.0, u = 0.0, delta_star = 0.0;
  double kappa = 0.0, fit_residual = 0.0;
  bool riemann = false;
  double riemann_lifespan = 0.0, riemann_delta_star = 0.0;
  int exit_code = kExitOk;
};
/// Simple-wave fan oracle (fan.csv, plane_series.csv, plane_report.json) and,
/// with plane.riemann, the 1-D Euler run on the euler section (riemann_series.csv).
PlaneOutcome plane_command(const RunConfig& cfg, const std::string& out);

struct EulerDataOutcome {
  HierarchyData data;
  bool physical = false;
  double max_sound_speed_error = 0.0;
  int exit_code = kExitOk;
};
/// Hierarchy data builder: euler_data.csv and hierarchy_report.json.
EulerDataOutcome euler_data_command(const RunConfig& cfg, const std::string& out);

struct ConvergenceOutcome {
  std::vector<ResidualEntry> suite;
  int exit_code = kExitOk;
};
/// Runs at (nx, ny) and (2 nx, 2 ny) without dissipation into out/coarse and
/// out/fine, then writes residual_convergence.json.
ConvergenceOutcome convergence_command(const RunConfig& cfg, const std::string& out);

}  // namespace shock
