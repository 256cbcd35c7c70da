// Command-line front end: simulate, plane, euler-data, verify, convergence.

#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "shockform/commands.hpp"
#include "shockform/errors.hpp"
#include "shockform/parallel.hpp"

namespace {

struct Common {
  std::string config;
  std::string out;
  unsigned threads = 0;
  bool quiet = false;
};

void add_common(CLI::App* sub, Common& c, bool needs_config) {
  auto* opt = sub->add_option("config,--config", c.config, "Run configuration (JSON or TOML)");
  if (needs_config) opt->required()->check(CLI::ExistingFile);
  sub->add_option("--out", c.out, "Output directory (overrides SHOCK_OUT and output.dir)");
}

const char* verdict_word(bool ok) { return ok ? "pass" : "FAIL"; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Shock formation solver for quasilinear wave equations"};
  app.require_subcommand(1);
  Common c;
  app.add_option("--threads", c.threads, "Worker thread cap (0: hardware count)");
  app.add_flag("--quiet,-q", c.quiet, "Suppress the summary");

  auto* simulate = app.add_subcommand("simulate", "2-D run with diagnostics");
  add_common(simulate, c, true);
  auto* plane = app.add_subcommand("plane", "Simple-wave fan oracle and 1-D Euler run");
  add_common(plane, c, true);
  auto* euler = app.add_subcommand("euler-data", "Build Euler hierarchy data and report");
  add_common(euler, c, true);
  auto* conv = app.add_subcommand("convergence", "Paired h, h/2 runs with the residual suite");
  add_common(conv, c, true);
  auto* verify = app.add_subcommand("verify", "Rebuild shock_report.json from saved artifacts");
  std::string run_dir;
  verify->add_option("run-dir", run_dir, "Directory written by simulate")->required()->check(CLI::ExistingDirectory);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? shock::kExitOk : shock::kExitError;
  }

  shock::set_thread_count(c.threads);
  auto say = [&](const std::string& line) {
    if (!c.quiet) std::printf("%s\n", line.c_str());
  };
  try {
    if (verify->parsed()) {
      const auto o = shock::verify_command(run_dir);
      say(std::string("reproduced: ") + (o.reproduced ? "yes" : "NO (report differs from shock_report.json)"));
      say(std::string("verdicts:   ") + verdict_word(o.passed));
      return o.exit_code;
    }
    const shock::RunConfig cfg = shock::parse_config_file(c.config);
    const std::string out = shock::resolve_output_dir(c.out, cfg);
    char buf[256];
    if (simulate->parsed()) {
      const auto o = shock::simulate_command(cfg, out);
      const auto& r = o.report;
      std::snprintf(buf, sizeof buf, "status %s  delta_star %.6g  t_lifespan %.6g  product %.6g", r.status.c_str(),
                    r.delta_star, r.t_lifespan_num, r.t_lifespan_num * r.delta_star);
      say(buf);
      say(std::string("verdicts ") + verdict_word(r.passed()) + "  (" + out + "/shock_report.json)");
      return o.exit_code;
    }
    if (plane->parsed()) {
      const auto o = shock::plane_command(cfg, out);
      std::snprintf(buf, sizeof buf, "status %s  T %.10g  delta_star %.10g  kappa %.10g", o.status.c_str(), o.T,
                    o.delta_star, o.kappa);
      say(buf);
      if (o.riemann) {
        std::snprintf(buf, sizeof buf, "euler  t_lifespan %.6g  delta_star %.6g  product %.6g", o.riemann_lifespan,
                      o.riemann_delta_star, o.riemann_lifespan * o.riemann_delta_star);
        say(buf);
      }
      return o.exit_code;
    }
    if (euler->parsed()) {
      const auto o = shock::euler_data_command(cfg, out);
      std::snprintf(buf, sizeof buf, "delta_star %.6g  width %.6g  cancellation %.3g  physicality %s",
                    o.data.delta_star, o.data.width, o.data.cancellation_ratio, verdict_word(o.physical));
      say(buf);
      return o.exit_code;
    }
    if (conv->parsed()) {
      const auto o = shock::convergence_command(cfg, out);
      for (const auto& e : o.suite) {
        std::snprintf(buf, sizeof buf, "%-16s %10.3e %10.3e  ratio %6.2f  %s", e.name.c_str(), e.coarse, e.fine,
                      e.ratio, shock::verdict_name(e.verdict).c_str());
        say(buf);
      }
      return o.exit_code;
    }
  } catch (const shock::Error& e) {
    std::fprintf(stderr, "error [%s]: %s\n", std::string(shock::errc_name(e.code())).c_str(), e.what());
    return shock::kExitError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return shock::kExitError;
  }
  return shock::kExitError;
}
