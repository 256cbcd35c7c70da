#include "shockform/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>
#define TOML_EXCEPTIONS 1
#include <toml.hpp>

#include "shockform/errors.hpp"

namespace shock {

namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

[[noreturn]] void invalid(const std::string& key, const std::string& why) {
  throw Error(Errc::ValidationError, key + ": " + why);
}

/// Reads typed keys of one JSON object and rejects the ones nobody asked for.
class Section {
 public:
  Section(const json& root, const std::string& name) : prefix_(name.empty() ? "" : name + ".") {
    if (name.empty()) {
      obj_ = &root;
    } else if (root.contains(name)) {
      obj_ = &root.at(name);
      if (!obj_->is_object()) invalid(name, "must be an object");
    }
  }
  Section(const json* obj, const std::string& prefix) : obj_(obj), prefix_(prefix + ".") {
    if (obj_ && !obj_->is_object()) invalid(prefix, "must be an object");
  }

  bool has(const std::string& key) const { return obj_ && obj_->contains(key); }
  const json* child(const std::string& key) {
    seen_.insert(key);
    return has(key) ? &obj_->at(key) : nullptr;
  }

  void get(const std::string& key, double& out) {
    if (const json* v = child(key)) {
      if (!v->is_number()) invalid(prefix_ + key, "must be a number");
      out = v->get<double>();
      if (!std::isfinite(out)) invalid(prefix_ + key, "must be finite");
    }
  }
  void get(const std::string& key, int& out) {
    if (const json* v = child(key)) {
      if (!v->is_number_integer()) invalid(prefix_ + key, "must be an integer");
      out = v->get<int>();
    }
  }
  void get(const std::string& key, bool& out) {
    if (const json* v = child(key)) {
      if (!v->is_boolean()) invalid(prefix_ + key, "must be true or false");
      out = v->get<bool>();
    }
  }
  void get(const std::string& key, std::string& out) {
    if (const json* v = child(key)) {
      if (!v->is_string()) invalid(prefix_ + key, "must be a string");
      out = v->get<std::string>();
    }
  }
  void get(const std::string& key, std::array<double, 6>& out) {
    if (const json* v = child(key)) {
      if (!v->is_array() || v->size() != 6) invalid(prefix_ + key, "must be 6 numbers (upper triangle, row-major)");
      for (int k = 0; k < 6; ++k) {
        if (!(*v)[k].is_number()) invalid(prefix_ + key, "must be 6 numbers (upper triangle, row-major)");
        out[k] = (*v)[k].get<double>();
      }
    }
  }

  void finish() const {
    if (!obj_) return;
    for (auto it = obj_->begin(); it != obj_->end(); ++it)
      if (!seen_.count(it.key())) invalid(prefix_ + it.key(), "unknown key");
  }

  const std::string& prefix() const { return prefix_; }

 private:
  const json* obj_ = nullptr;
  std::string prefix_;
  std::set<std::string> seen_;
};

void positive(double v, const std::string& key) {
  if (!(v > 0.0)) invalid(key, "must be positive");
}

std::size_t line_of(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  for (std::size_t k = 0; k < std::min(byte, text.size()); ++k)
    if (text[k] == '\n') ++line;
  return line;
}

void read_profile(Section& data, Profile& p) {
  Section s(data.child("profile"), data.prefix() + "profile");
  s.get("kind", p.kind);
  s.get("amplitude", p.amplitude);
  s.get("center", p.center);
  s.get("width", p.width);
  s.get("power", p.power);
  s.finish();
}

json toml_to_json(const toml::node& n) {
  if (const auto* t = n.as_table()) {
    json o = json::object();
    for (const auto& [k, v] : *t) o[std::string(k.str())] = toml_to_json(v);
    return o;
  }
  if (const auto* a = n.as_array()) {
    json o = json::array();
    for (const auto& v : *a) o.push_back(toml_to_json(v));
    return o;
  }
  if (const auto* v = n.as_integer()) return json(v->get());
  if (const auto* v = n.as_floating_point()) return json(v->get());
  if (const auto* v = n.as_boolean()) return json(v->get());
  if (const auto* v = n.as_string()) return json(v->get());
  throw Error(Errc::ParseError, "unsupported TOML value (dates and times are not config values)");
}

bool is_toml(const std::string& source) {
  return source.size() >= 5 && source.compare(source.size() - 5, 5, ".toml") == 0;
}

}  // namespace

RunConfig parse_config_text(const std::string& text, const std::string& source) {
  json root;
  if (is_toml(source)) {
    try {
      root = toml_to_json(toml::parse(text, std::string_view(source)));
    } catch (const toml::parse_error& e) {
      std::ostringstream os;
      os << source << ":" << e.source().begin.line << ": " << e.description();
      throw Error(Errc::ParseError, os.str());
    }
  } else {
    try {
      root = json::parse(text);
    } catch (const json::parse_error& e) {
      std::ostringstream os;
      os << source << ":" << line_of(text, e.byte) << ": " << e.what();
      throw Error(Errc::ParseError, os.str());
    }
  }
  if (!root.is_object()) throw Error(Errc::ParseError, source + ":1: top level must be an object");

  RunConfig c;
  Section top(root, "");
  for (const char* name : {"model", "grid", "run", "data", "euler", "plane", "output", "diagnostics"}) top.child(name);
  top.get("seed", c.seed);
  top.finish();

  {
    Section s(root, "model");
    if (!s.has("kind")) invalid("model.kind", "required");
    s.get("kind", c.model.kind);
    s.get("A", c.model.A);
    s.get("B", c.model.B);
    s.get("a", c.model.a);
    s.get("psi_max", c.model.psi_max);
    s.get("normalize", c.model.normalize);
    s.finish();
    if (c.model.kind != "quadratic" && c.model.kind != "polynomial" && c.model.kind != "moving_medium")
      invalid("model.kind", "must be quadratic, polynomial or moving_medium");
    positive(c.model.psi_max, "model.psi_max");
  }
  {
    Section s(root, "run");
    SolverOptions& r = c.run;
    s.get("t_max", r.t_max);
    s.get("cfl", r.cfl);
    s.get("mu_stop", r.mu_stop);
    s.get("mu_floor", r.mu_floor);
    s.get("dissipation", r.dissipation);
    s.get("eikonal_order", r.eikonal_order);
    s.get("trace", r.trace);
    s.get("char_stride", r.char_stride);
    s.get("probe_stride", r.probe_stride);
    s.get("probe_mu_min", r.probe_mu_min);
    s.get("n_seed_u", r.n_seed_u);
    s.get("n_seed_theta", r.n_seed_theta);
    s.get("sat_factor", r.sat_factor);
    s.finish();
    positive(r.t_max, "run.t_max");
    if (!(r.cfl > 0.0 && r.cfl <= 1.0)) invalid("run.cfl", "must be in (0, 1]");
    if (!(r.mu_stop > 0.0 && r.mu_stop < 1.0)) invalid("run.mu_stop", "must be in (0, 1)");
    if (!(r.mu_floor > 0.0 && r.mu_floor < r.mu_stop)) invalid("run.mu_floor", "must be in (0, mu_stop)");
    if (!(r.dissipation >= 0.0)) invalid("run.dissipation", "must be nonnegative");
    if (r.eikonal_order != 2 && r.eikonal_order != 3) invalid("run.eikonal_order", "must be 2 or 3");
    if (r.char_stride < 1) invalid("run.char_stride", "must be at least 1");
    if (r.probe_stride < 1) invalid("run.probe_stride", "must be at least 1");
    if (r.n_seed_u < 1) invalid("run.n_seed_u", "must be at least 1");
    if (r.n_seed_theta < 1) invalid("run.n_seed_theta", "must be at least 1");
    positive(r.sat_factor, "run.sat_factor");
  }
  {
    Section s(root, "grid");
    s.get("nx", c.grid.nx);
    s.get("ny", c.grid.ny);
    s.get("x_min", c.grid.x_min);
    s.get("x_max", c.grid.x_max);
    s.finish();
    if (std::isnan(c.grid.x_max)) c.grid.x_max = c.grid.x_min + 1.1 + 2.0 * c.run.t_max;
    build_grid(c);  // domain-sizing rule
  }
  {
    Section s(root, "data");
    DataSpec& d = c.data;
    s.get("kind", d.kind);
    read_profile(s, d.profile);
    s.get("delta", d.delta_target);
    s.get("eps", d.eps);
    s.get("mode", d.mode);
    s.get("lpsi", d.lpsi);
    s.finish();
    if (d.kind != "zero" && d.kind != "simple_wave" && d.kind != "hierarchy")
      invalid("data.kind", "must be zero, simple_wave or hierarchy");
    try {
      validate_profile(d.profile);
    } catch (const Error& e) {
      throw Error(Errc::ValidationError, std::string("data.") + e.what());
    }
    if (d.profile.center - d.profile.width < 0.0 || d.profile.center + d.profile.width > 1.0)
      invalid("data.profile.width", "profile support must lie in [0, 1]");
    if (!(d.delta_target >= 0.0)) invalid("data.delta", "must be nonnegative");
    if (!(d.eps >= 0.0)) invalid("data.eps", "must be nonnegative");
    if (d.mode < 1) invalid("data.mode", "must be at least 1");
  }
  {
    Section s(root, "euler");
    EulerConfig& e = c.euler;
    s.get("s", e.s);
    s.get("k", e.k);
    s.get("eps0", e.eps0);
    s.get("delta0", e.delta0);
    {
      Section b(s.child("bump"), "euler.bump");
      b.get("center", e.bump.center);
      b.get("width", e.bump.width);
      b.finish();
    }
    s.get("n", e.n);
    s.get("x_min", e.x_min);
    s.get("x_max", e.x_max);
    s.get("t_max", e.t_max);
    s.get("mu_stop", e.mu_stop);
    s.get("cfl", e.cfl);
    s.get("n_markers", e.n_markers);
    s.finish();
    positive(e.k, "euler.k");
    positive(e.eps0, "euler.eps0");
    positive(e.delta0, "euler.delta0");
    if (e.n < 16) invalid("euler.n", "must be at least 16");
    if (!(e.x_max > e.x_min)) invalid("euler.x_max", "must exceed euler.x_min");
    if (e.n_markers < 3) invalid("euler.n_markers", "must be at least 3");
  }
  {
    Section s(root, "plane");
    s.get("n_u", c.plane.n_u);
    s.get("n_t", c.plane.n_t);
    s.get("riemann", c.plane.riemann);
    s.finish();
    if (c.plane.n_u < 16) invalid("plane.n_u", "must be at least 16");
    if (c.plane.n_t < 2) invalid("plane.n_t", "must be at least 2");
  }
  {
    Section s(root, "output");
    s.get("dir", c.output.dir);
    s.get("stride", c.output.stride);
    s.finish();
    if (c.output.stride < 0) invalid("output.stride", "must be nonnegative");
  }
  {
    Section s(root, "diagnostics");
    DiagnosticsOptions& d = c.diagnostics;
    s.get("fit_lo", d.fit_lo);
    s.get("fit_hi", d.fit_hi);
    if (s.has("tol_lifespan")) s.get("tol_lifespan", d.tol_lifespan);
    s.get("tail_hi", d.tail_hi);
    s.get("tail_min_samples", d.tail_min_samples);
    s.get("rate_lo", d.rate_lo);
    s.get("rate_hi", d.rate_hi);
    s.get("product_variation", d.product_variation);
    s.get("product_floor", d.product_floor);
    s.get("trigger_fraction", d.trigger_fraction);
    s.get("regularity_max", d.regularity_max);
    s.get("growth_min", d.growth_min);
    s.get("c_prop", d.c_prop);
    s.get("residual_mu_min", d.residual_mu_min);
    s.get("ratio_lo", d.ratio_lo);
    s.get("ratio_hi", d.ratio_hi);
    s.get("residual_floor", d.residual_floor);
    s.finish();
    if (!(d.fit_lo > 0.0 && d.fit_lo < d.fit_hi && d.fit_hi <= 1.0))
      invalid("diagnostics.fit_lo", "fit window must satisfy 0 < fit_lo < fit_hi <= 1");
    d.mu_stop = c.run.mu_stop;
  }
  return c;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::ParseError, path + ": cannot open");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path);
}

std::string resolved_config_json(const RunConfig& c) {
  auto arr6 = [](const std::array<double, 6>& a) { return ojson(std::vector<double>(a.begin(), a.end())); };
  ojson j;
  j["seed"] = c.seed;
  j["model"] = ojson{{"kind", c.model.kind},   {"A", arr6(c.model.A)},           {"B", arr6(c.model.B)},
                     {"a", c.model.a},         {"psi_max", c.model.psi_max}, {"normalize", c.model.normalize}};
  j["grid"] = ojson{{"nx", c.grid.nx}, {"ny", c.grid.ny}, {"x_min", c.grid.x_min}, {"x_max", c.grid.x_max}};
  const SolverOptions& r = c.run;
  j["run"] = ojson{{"t_max", r.t_max},
                   {"cfl", r.cfl},
                   {"mu_stop", r.mu_stop},
                   {"mu_floor", r.mu_floor},
                   {"dissipation", r.dissipation},
                   {"eikonal_order", r.eikonal_order},
                   {"trace", r.trace},
                   {"char_stride", r.char_stride},
                   {"probe_stride", r.probe_stride},
                   {"probe_mu_min", r.probe_mu_min},
                   {"n_seed_u", r.n_seed_u},
                   {"n_seed_theta", r.n_seed_theta},
                   {"sat_factor", r.sat_factor}};
  const DataSpec& d = c.data;
  j["data"] = ojson{{"kind", d.kind},
                    {"profile",
                     ojson{{"kind", d.profile.kind},
                           {"amplitude", d.profile.amplitude},
                           {"center", d.profile.center},
                           {"width", d.profile.width},
                           {"power", d.profile.power}}},
                    {"delta", d.delta_target},
                    {"eps", d.eps},
                    {"mode", d.mode},
                    {"lpsi", d.lpsi}};
  const EulerConfig& e = c.euler;
  j["euler"] = ojson{{"s", e.s},
                     {"k", e.k},
                     {"eps0", e.eps0},
                     {"delta0", e.delta0},
                     {"bump", ojson{{"center", e.bump.center}, {"width", e.bump.width}}},
                     {"n", e.n},
                     {"x_min", e.x_min},
                     {"x_max", e.x_max},
                     {"t_max", e.t_max},
                     {"mu_stop", e.mu_stop},
                     {"cfl", e.cfl},
                     {"n_markers", e.n_markers}};
  j["plane"] = ojson{{"n_u", c.plane.n_u}, {"n_t", c.plane.n_t}, {"riemann", c.plane.riemann}};
  j["output"] = ojson{{"dir", c.output.dir}, {"stride", c.output.stride}};
  const DiagnosticsOptions& g = c.diagnostics;
  ojson diag{{"fit_lo", g.fit_lo},
             {"fit_hi", g.fit_hi},
             {"tail_hi", g.tail_hi},
             {"tail_min_samples", g.tail_min_samples},
             {"rate_lo", g.rate_lo},
             {"rate_hi", g.rate_hi},
             {"product_variation", g.product_variation},
             {"product_floor", g.product_floor},
             {"trigger_fraction", g.trigger_fraction},
             {"regularity_max", g.regularity_max},
             {"growth_min", g.growth_min},
             {"c_prop", g.c_prop},
             {"residual_mu_min", g.residual_mu_min},
             {"ratio_lo", g.ratio_lo},
             {"ratio_hi", g.ratio_hi},
             {"residual_floor", g.residual_floor}};
  if (std::isfinite(g.tol_lifespan)) diag["tol_lifespan"] = g.tol_lifespan;
  j["diagnostics"] = diag;
  return j.dump(2) + "\n";
}

MetricModel build_model(const ModelConfig& m) {
  MetricModel model = [&] {
    if (m.kind == "moving_medium") return moving_medium_model(m.a, m.psi_max);
    const Mat3 A = symmetric_from_upper(m.A.data());
    if (m.kind == "polynomial") return MetricModel::polynomial(A, symmetric_from_upper(m.B.data()), m.psi_max);
    return MetricModel::quadratic(A, m.psi_max);
  }();
  return m.normalize ? normalize_time_component(model) : model;
}

Grid2D build_grid(const RunConfig& c) {
  return make_grid(c.grid.nx, c.grid.ny, c.grid.x_min, c.grid.x_max, c.run.t_max);
}

}  // namespace shock
