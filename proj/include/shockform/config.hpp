#pragma once

#include <array>
#include <limits>
#include <string>

#include "shockform/diagnostics.hpp"
#include "shockform/euler.hpp"
#include "shockform/model.hpp"
#include "shockform/solver2d.hpp"

namespace shock {

struct ModelConfig {
  std::string kind;  // quadratic | polynomial | moving_medium
  std::array<double, 6> A{};  // upper triangle, row-major
  std::array<double, 6> B{};  // polynomial only
  double a = 1.0;             // moving_medium only
  double psi_max = 0.5;
  bool normalize = true;  // enforce (g^-1)^00 = -1
};

struct GridConfig {
  int nx = 2048;
  int ny = 8;
  double x_min = -0.05;
  double x_max = std::numeric_limits<double>::quiet_NaN();  // default x_min + 1.1 + 2 t_max
};

struct EulerConfig {
  double s = 1.0;
  double k = 1.0;
  double eps0 = 0.01;
  double delta0 = 0.5;
  BumpSpec bump;
  int n = 2048;
  double x_min = -0.25;
  double x_max = 6.0;
  double t_max = 10.0;
  double mu_stop = 0.05;
  double cfl = 0.4;
  int n_markers = 257;
};

struct PlaneConfig {
  int n_u = 4096;
  int n_t = 256;
  bool riemann = false;  // also run the 1-D Euler evolution on the euler section
};

struct OutputConfig {
  std::string dir = "out";
  int stride = 0;  // snapshot stride in steps, 0 for none
};

struct RunConfig {
  ModelConfig model;
  GridConfig grid;
  SolverOptions run;
  DataSpec data;
  EulerConfig euler;
  PlaneConfig plane;
  OutputConfig output;
  DiagnosticsOptions diagnostics;
  int seed = 0;
};

/// Parses a JSON document, or TOML when source ends in ".toml". ParseError
/// carries the line; ValidationError names the offending key. Unknown keys
/// are rejected.
RunConfig parse_config_text(const std::string& text, const std::string& source = "<config>");
RunConfig parse_config_file(const std::string& path);

/// Fully resolved configuration (defaults filled in) as pretty JSON.
std::string resolved_config_json(const RunConfig& cfg);

MetricModel build_model(const ModelConfig& m);
Grid2D build_grid(const RunConfig& cfg);

}  // namespace shock
