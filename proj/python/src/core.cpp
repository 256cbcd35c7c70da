#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "shockform/commands.hpp"
#include "shockform/config.hpp"
#include "shockform/errors.hpp"
#include "shockform/euler.hpp"
#include "shockform/plane.hpp"

namespace py = pybind11;
using namespace shock;

namespace {

Mat3 upper_to_matrix(const std::array<double, 6>& up) { return symmetric_from_upper(up.data()); }

Profile make_profile(const std::string& kind, double amplitude, double center, double width, int power) {
  Profile p;
  p.kind = kind;
  p.amplitude = amplitude;
  p.center = center;
  p.width = width;
  p.power = power;
  validate_profile(p);
  return p;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Shock formation toolkit for quasilinear wave equations";

  static py::exception<Error> error(m, "ShockError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      error(("[" + std::string(errc_name(e.code())) + "] " + e.what()).c_str());
    }
  });

  py::class_<MetricModel>(m, "MetricModel")
      .def_property_readonly("normalized", &MetricModel::normalized)
      .def_property_readonly("psi_max", &MetricModel::psi_max)
      .def("metric", [](const MetricModel& mm, double psi) { return Mat3(evaluate_metric(mm, psi)); })
      .def("inverse", [](const MetricModel& mm, double psi) { return Mat3(inverse_metric(mm, psi)); })
      .def("nonlinearity", [](const MetricModel& mm) { return genuine_nonlinearity_coefficient(mm); },
           "G(L, L) on the background; zero when the law is not genuinely nonlinear.");

  m.def(
      "quadratic_model",
      [](const std::array<double, 6>& A, double psi_max, bool normalize) {
        const MetricModel q = MetricModel::quadratic(upper_to_matrix(A), psi_max);
        return normalize ? normalize_time_component(q) : q;
      },
      py::arg("A"), py::arg("psi_max") = 0.5, py::arg("normalize") = true,
      "g = m + psi A with A given by its upper triangle (00, 01, 02, 11, 12, 22).");
  m.def(
      "moving_medium_model", [](double a, double psi_max) { return moving_medium_model(a, psi_max); },
      py::arg("a") = 1.0, py::arg("psi_max") = 0.5);

  m.def(
      "simple_wave_blowup",
      [](const MetricModel& mm, const std::string& kind, double amplitude, double center, double width, int power,
         int n_u) {
        const CharacteristicFan fan =
            simple_wave_fan(mm, SimpleWaveData{make_profile(kind, amplitude, center, width, power), n_u});
        const BlowupPrediction bp = simple_wave_blowup_time(fan);
        py::dict d;
        d["T"] = bp.T;
        d["u"] = bp.u;
        d["delta_star"] = fan_delta_star(fan);
        return d;
      },
      py::arg("model"), py::arg("kind") = "sinpow", py::arg("amplitude") = 0.1, py::arg("center") = 0.5,
      py::arg("width") = 0.5, py::arg("power") = 3, py::arg("n_u") = 4096,
      "First-crossing time of the plane simple wave psi = P(1 - x1).");

  m.def(
      "sound_speed",
      [](double s, double sigma) { return sound_speed(make_fluid_model(power_lagrangian(s), 1.0), sigma); },
      py::arg("s"), py::arg("sigma") = 1.0, "Sound speed of the fluid with Lagrangian sigma^(s+1).");
  m.def(
      "physicality",
      [](double s, double sigma_lo, double sigma_hi) {
        const PhysicalityReport r = physicality_check(power_lagrangian(s), sigma_lo, sigma_hi);
        return py::make_tuple(r.pass, r.first_violation);
      },
      py::arg("s"), py::arg("sigma_lo") = 0.25, py::arg("sigma_hi") = 4.0);

  m.def(
      "resolved_config",
      [](const std::string& text) { return resolved_config_json(parse_config_text(text)); }, py::arg("text"),
      "Validates a JSON config and returns it with every default filled in.");
  m.def(
      "simulate",
      [](const std::string& config_path, const std::string& out) {
        const SimulateOutcome o = [&] {
          py::gil_scoped_release release;
          return simulate_command(parse_config_file(config_path), out);
        }();
        return py::make_tuple(o.exit_code, report_json(o.report));
      },
      py::arg("config"), py::arg("out"), "Runs the 2-D solver; returns (exit code, report JSON).");
  m.def(
      "plane",
      [](const std::string& config_path, const std::string& out) {
        const PlaneOutcome o = plane_command(parse_config_file(config_path), out);
        py::dict d;
        d["status"] = o.status;
        d["T"] = o.T;
        d["delta_star"] = o.delta_star;
        d["kappa"] = o.kappa;
        d["exit_code"] = o.exit_code;
        return d;
      },
      py::arg("config"), py::arg("out"));
  m.def(
      "verify",
      [](const std::string& dir) {
        const VerifyOutcome o = verify_command(dir);
        return py::make_tuple(o.exit_code, o.reproduced, o.passed);
      },
      py::arg("run_dir"), "Rebuilds shock_report.json from saved tables; returns (exit code, reproduced, passed).");
}
