#include "shockform/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/tools/minima.hpp>
#include <json.hpp>

#include "shockform/errors.hpp"
#include "shockform/fit.hpp"

namespace shock {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
using ojson = nlohmann::ordered_json;

ojson real(double v) { return std::isfinite(v) ? ojson(v) : ojson(nullptr); }
double real_of(const ojson& j) { return j.is_null() ? kNaN : j.get<double>(); }
}  // namespace

std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::Vacuous: return "vacuous";
  }
  return "vacuous";
}

MuFit fit_mu_star(const std::vector<double>& t, const std::vector<double>& mu_star, double lo, double hi) {
  std::vector<double> x, y;
  for (std::size_t k = 0; k < t.size(); ++k)
    if (mu_star[k] >= lo && mu_star[k] <= hi) {
      x.push_back(t[k]);
      y.push_back(mu_star[k]);
    }
  MuFit f;
  f.n = static_cast<int>(x.size());
  if (x.size() < 2) return f;
  const LineFit lf = fit_line(x, y);
  if (!(lf.slope < 0.0) || !(lf.intercept > 0.0)) return f;
  f.ok = true;
  f.offset = lf.intercept;
  f.kappa = -lf.slope / lf.intercept;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double model = lf.intercept + lf.slope * x[k];
    f.residual = std::max(f.residual, std::abs(y[k] - model) / y[k]);
  }
  return f;
}

MuFit fit_mu_star(const std::vector<SeriesRow>& series, double lo, double hi) {
  std::vector<double> t, m;
  for (const auto& r : series) {
    t.push_back(r.t);
    m.push_back(r.mu_star);
  }
  return fit_mu_star(t, m, lo, hi);
}

double lifespan_from_fit(const MuFit& fit) { return fit.ok ? 1.0 / fit.kappa : kNaN; }

Verdict lifespan_check(double t_lifespan, double delta_star, double tol) {
  if (!(delta_star > 0.0)) return Verdict::Vacuous;
  if (!std::isfinite(t_lifespan)) return Verdict::Fail;
  return std::abs(t_lifespan * delta_star - 1.0) <= tol ? Verdict::Pass : Verdict::Fail;
}

PowerFit fit_power_blowup(const std::vector<double>& t, const std::vector<double>& y) {
  const std::size_t n = t.size();
  if (n < 3) throw Error(Errc::ValidationError, "power fit needs at least three samples");
  const double t_last = t.back();
  const double span = std::max(t_last - t.front(), 1e-12);
  std::vector<double> x(n), z(n);
  for (std::size_t k = 0; k < n; ++k) z[k] = std::log(y[k]);
  auto rss = [&](double s) {
    const double T = t_last + std::exp(s);
    for (std::size_t k = 0; k < n; ++k) x[k] = std::log(T - t[k]);
    const LineFit lf = fit_line(x, z);
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double r = z[k] - lf.intercept - lf.slope * x[k];
      acc += r * r;
    }
    return acc;
  };
  const auto best = boost::math::tools::brent_find_minima(rss, std::log(1e-4 * span), std::log(10.0 * span), 40);
  const double T = t_last + std::exp(best.first);
  for (std::size_t k = 0; k < n; ++k) x[k] = std::log(T - t[k]);
  const LineFit lf = fit_line(x, z);
  return {-lf.slope, T, best.second};
}

RateResult blowup_rate_check(const std::vector<SeriesRow>& series, const RunInfo& info,
                             const DiagnosticsOptions& opt) {
  RateResult r;
  r.product_floor = opt.product_floor * info.delta_star / (4.0 * std::abs(info.G_LL0));
  if (info.status != "shocked") return r;
  std::vector<double> t, y, prod;
  for (const auto& s : series) {
    if (s.mu_star < opt.mu_stop || s.mu_star > opt.tail_hi) continue;
    t.push_back(s.t);
    y.push_back(s.max_abs_d1psi);
    prod.push_back(s.xbreve_psi_at_min);
  }
  r.n = static_cast<int>(t.size());
  double worst = -std::numeric_limits<double>::infinity();
  bool any_low = false;
  for (const auto& s : series)
    if (s.n_low > 0) {
      any_low = true;
      worst = std::max(worst, s.max_Lmu_low);
    }
  if (any_low) {
    r.trigger_worst = worst;
    r.trigger = worst <= -opt.trigger_fraction * info.delta_star ? Verdict::Pass : Verdict::Fail;
  }
  if (r.n < opt.tail_min_samples) {
    r.verdict = Verdict::Fail;
    r.rate_ok = false;
    return r;
  }
  const PowerFit pf = fit_power_blowup(t, y);
  r.exponent = pf.p;
  r.T_fit = pf.T;
  r.product_min = *std::min_element(prod.begin(), prod.end());
  r.product_max = *std::max_element(prod.begin(), prod.end());
  r.rate_ok = pf.p >= opt.rate_lo && pf.p <= opt.rate_hi;
  r.product_ok = r.product_max > 0.0 && (r.product_max - r.product_min) / r.product_max < opt.product_variation;
  r.floor_ok = r.product_min >= r.product_floor;
  r.verdict = r.rate_ok && r.product_ok && r.floor_ok ? Verdict::Pass : Verdict::Fail;
  return r;
}

RegularityResult geometric_regularity_check(const std::vector<CharRecord>& chars,
                                            const std::vector<SeriesRow>& series, double t_lifespan,
                                            const RunInfo& info, const DiagnosticsOptions& opt) {
  RegularityResult res;
  if (series.empty()) return res;
  res.growth = series.front().max_abs_d1psi > 0.0 ? series.back().max_abs_d1psi / series.front().max_abs_d1psi
                                                  : kNaN;
  // Records of each curve in time order; file order is time-major.
  std::map<int, std::vector<const CharRecord*>> by_id;
  for (const auto& c : chars) by_id[c.id].push_back(&c);
  std::map<double, double> M;  // t -> max derivative
  auto bump = [&](double t, double v) {
    auto it = M.find(t);
    if (it == M.end())
      M.emplace(t, v);
    else
      it->second = std::max(it->second, v);
  };
  auto at_time = [](const std::vector<const CharRecord*>& recs, double t) -> const CharRecord* {
    auto it = std::lower_bound(recs.begin(), recs.end(), t,
                               [](const CharRecord* r, double tt) { return r->t < tt; });
    return it != recs.end() && (*it)->t == t ? *it : nullptr;
  };
  bool any = false;
  for (const auto& [id, recs] : by_id) {
    if (recs.empty() || recs.front()->role != 0) continue;
    auto sat = [&](int k) -> const std::vector<const CharRecord*>* {
      auto it = by_id.find(id + k);
      return it != by_id.end() && !it->second.empty() && it->second.front()->role == k ? &it->second : nullptr;
    };
    const auto* up = sat(1);
    const auto* um = sat(2);
    const auto* tp = sat(3);
    const auto* tm = sat(4);
    for (std::size_t k = 0; k < recs.size(); ++k) {
      const double t = recs[k]->t;
      if (std::isfinite(t_lifespan) && !(t < t_lifespan)) continue;
      double v = 0.0;
      if (recs.size() >= 2) {
        const std::size_t a = k == 0 ? 0 : k - 1;
        const std::size_t b = k + 1 < recs.size() ? k + 1 : k;
        if (b > a) v = std::max(v, std::abs((recs[b]->psi - recs[a]->psi) / (recs[b]->t - recs[a]->t)));
      }
      if (up && um) {
        const CharRecord* p = at_time(*up, t);
        const CharRecord* m = at_time(*um, t);
        if (p && m) v = std::max(v, std::abs((p->psi - m->psi) / (p->u0 - m->u0)));
      }
      if (tp && tm) {
        const CharRecord* p = at_time(*tp, t);
        const CharRecord* m = at_time(*tm, t);
        if (p && m) v = std::max(v, std::abs((p->psi - m->psi) / (p->theta0 - m->theta0)));
      }
      bump(t, v);
      any = true;
    }
  }
  if (!any) return res;
  res.initial = M.begin()->second;
  for (const auto& [t, v] : M) res.peak = std::max(res.peak, v);
  res.ratio = res.peak / (res.initial + info.eps0);
  if (info.status != "shocked") return res;
  res.verdict = res.ratio <= opt.regularity_max && res.growth >= opt.growth_min ? Verdict::Pass : Verdict::Fail;
  return res;
}

SmallnessResult smallness_propagation_check(const std::vector<SeriesRow>& series, double eps0,
                                            double t_lifespan, double c_prop) {
  SmallnessResult r;
  r.bound = c_prop * eps0;
  for (const auto& s : series) {
    if (std::isfinite(t_lifespan) && s.t > t_lifespan) continue;
    r.max_LPsi = std::max(r.max_LPsi, s.max_abs_LPsi);
    r.max_d2psi = std::max(r.max_d2psi, s.max_abs_d2psi);
  }
  r.verdict = r.max_LPsi <= r.bound && r.max_d2psi <= r.bound ? Verdict::Pass : Verdict::Fail;
  return r;
}

std::vector<BlowupPoint> blowup_points(const std::vector<CharRecord>& chars, double mu_stop) {
  std::map<int, const CharRecord*> last;
  for (const auto& c : chars)
    if (c.role == 0) last[c.id] = &c;
  std::vector<BlowupPoint> out;
  for (const auto& [id, c] : last)
    if (c->mu_field <= 2.0 * mu_stop) out.push_back({c->u0, c->theta0, c->x1, c->x2});
  return out;
}

std::map<std::string, double> residual_maxima(const std::vector<ResidualRow>& rows, double mu_min) {
  std::map<std::string, double> out;
  for (const auto& name : residual_names()) out[name] = 0.0;
  for (const auto& r : rows) {
    if (!(r.mu_star >= mu_min)) continue;
    for (const auto& name : residual_names()) out[name] = std::max(out[name], residual_value(r, name));
  }
  return out;
}

const std::vector<std::string>& convergence_identities() {
  static const std::vector<std::string> names = {"eikonal",   "g_LL",    "g_XX",      "g_LX",
                                                 "mu_inv_sq", "mu_du_X", "transport", "lnupsilon_trchi",
                                                 "jacobian"};
  return names;
}

std::vector<ResidualEntry> residual_convergence_suite(const std::vector<ResidualRow>& coarse,
                                                      const std::vector<ResidualRow>& fine,
                                                      const DiagnosticsOptions& opt) {
  const auto a = residual_maxima(coarse, opt.residual_mu_min);
  const auto b = residual_maxima(fine, opt.residual_mu_min);
  std::vector<ResidualEntry> out;
  for (const auto& name : convergence_identities()) {
    ResidualEntry e;
    e.name = name;
    e.coarse = a.at(name);
    e.fine = b.at(name);
    if (e.coarse < opt.residual_floor && e.fine < opt.residual_floor) {
      e.ratio = kNaN;
      e.verdict = Verdict::Vacuous;
    } else {
      e.ratio = e.coarse / e.fine;
      e.verdict = e.ratio >= opt.ratio_lo && e.ratio <= opt.ratio_hi ? Verdict::Pass : Verdict::Fail;
    }
    out.push_back(e);
  }
  return out;
}

bool ShockReport::passed() const {
  for (Verdict v : {lifespan, rate.verdict, rate.trigger, regularity.verdict, smallness.verdict})
    if (v == Verdict::Fail) return false;
  return true;
}

ShockReport build_report(const RunTables& tables, const RunInfo& info, const DiagnosticsOptions& opt) {
  ShockReport r;
  r.status = info.status;
  r.delta_star = info.delta_star;
  const MuFit fit = fit_mu_star(tables.series, opt.fit_lo, opt.fit_hi);
  r.kappa_fit = fit.kappa;
  r.kappa_offset = fit.offset;
  r.kappa_residual = fit.residual;
  const bool shocked = info.status == "shocked";
  r.t_lifespan_num = shocked ? lifespan_from_fit(fit) : kNaN;
  r.tol_lifespan = std::isfinite(opt.tol_lifespan) ? opt.tol_lifespan : 10.0 * info.eps0 + 5.0 * info.dx;
  r.lifespan = shocked ? lifespan_check(r.t_lifespan_num, info.delta_star, r.tol_lifespan) : Verdict::Vacuous;
  if (shocked) r.blowup_points = blowup_points(tables.chars, opt.mu_stop);
  r.rate = blowup_rate_check(tables.series, info, opt);
  r.regularity = geometric_regularity_check(tables.chars, tables.series, r.t_lifespan_num, info, opt);
  if (info.data_kind == "hierarchy")
    r.smallness = smallness_propagation_check(tables.series, info.eps0, r.t_lifespan_num, opt.c_prop);
  r.residual_table = residual_maxima(tables.residuals, opt.residual_mu_min);
  return r;
}

std::string report_json(const ShockReport& r) {
  ojson j;
  j["status"] = r.status;
  j["passed"] = r.passed();
  j["t_lifespan_num"] = real(r.t_lifespan_num);
  j["delta_star"] = real(r.delta_star);
  j["lifespan_product"] = real(r.t_lifespan_num * r.delta_star);
  j["tol_lifespan"] = real(r.tol_lifespan);
  j["kappa_fit"] = real(r.kappa_fit);
  j["kappa_offset"] = real(r.kappa_offset);
  j["kappa_residual"] = real(r.kappa_residual);
  ojson pts = ojson::array();
  for (const auto& p : r.blowup_points)
    pts.push_back(ojson{{"u", real(p.u)}, {"theta", real(p.theta)}, {"x1", real(p.x1)}, {"x2", real(p.x2)}});
  j["blowup_points"] = pts;
  j["rate_exponent"] = real(r.rate.exponent);
  j["rate_T_fit"] = real(r.rate.T_fit);
  j["rate_samples"] = r.rate.n;
  j["mu_xpsi_product_range"] = ojson::array({real(r.rate.product_min), real(r.rate.product_max)});
  j["mu_xpsi_product_floor"] = real(r.rate.product_floor);
  j["trigger_max_Lmu"] = real(r.rate.trigger_worst);
  j["regularity_ratio"] = real(r.regularity.ratio);
  j["d1psi_growth"] = real(r.regularity.growth);
  j["smallness"] = ojson{{"max_LPsi", real(r.smallness.max_LPsi)},
                         {"max_d2psi", real(r.smallness.max_d2psi)},
                         {"bound", real(r.smallness.bound)}};
  ojson table;
  for (const auto& name : residual_names()) table[name] = real(r.residual_table.at(name));
  j["residual_table"] = table;
  j["verdicts"] = ojson{{"lifespan", verdict_name(r.lifespan)},
                        {"blowup_rate", verdict_name(r.rate.verdict)},
                        {"trigger", verdict_name(r.rate.trigger)},
                        {"geometric_regularity", verdict_name(r.regularity.verdict)},
                        {"smallness", verdict_name(r.smallness.verdict)}};
  return j.dump(2) + "\n";
}

std::string run_info_json(const RunInfo& info) {
  ojson j;
  j["status"] = info.status;
  j["data_kind"] = info.data_kind;
  j["delta_star"] = real(info.delta_star);
  j["eps0"] = real(info.eps0);
  j["dx"] = real(info.dx);
  j["G_LL0"] = real(info.G_LL0);
  return j.dump(2) + "\n";
}

RunInfo parse_run_info(const std::string& text) {
  RunInfo info;
  try {
    const ojson j = ojson::parse(text);
    info.status = j.at("status").get<std::string>();
    info.data_kind = j.at("data_kind").get<std::string>();
    info.delta_star = real_of(j.at("delta_star"));
    info.eps0 = real_of(j.at("eps0"));
    info.dx = real_of(j.at("dx"));
    info.G_LL0 = real_of(j.at("G_LL0"));
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::ParseError, std::string("run_info.json: ") + e.what());
  }
  return info;
}

}  // namespace shock
