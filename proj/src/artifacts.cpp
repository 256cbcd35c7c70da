#include "shockform/artifacts.hpp"

#include "shockform/errors.hpp"
#include "shockform/io.hpp"

namespace shock {

namespace {

const std::vector<std::string> kSeriesHeader = {
    "t",         "mu_star",   "max_abs_d1psi",     "max_abs_LPsi", "max_abs_d2psi",
    "argmin_x1", "argmin_x2", "xbreve_psi_at_min", "max_Lmu_low",  "n_low"};

const std::vector<std::string> kCharsHeader = {"id", "role", "u0",      "theta0", "t",        "x1",
                                               "x2", "mu_char", "upsilon", "psi",    "mu_field", "u_field"};

const std::vector<std::string> kResidualNames = {"eikonal",   "g_LL",      "g_XX",
                                                 "g_LX",      "mu_inv_sq", "mu_du_X",
                                                 "transport", "lnupsilon_trchi", "jacobian", "char_u"};

std::vector<std::string> residual_header() {
  std::vector<std::string> h = {"t", "mu_star"};
  h.insert(h.end(), kResidualNames.begin(), kResidualNames.end());
  return h;
}

void check_header(const CsvTable& t, const std::vector<std::string>& want, const std::string& path) {
  if (t.header != want) throw Error(Errc::ParseError, path + ": unexpected header");
}

}  // namespace

const std::vector<std::string>& residual_names() { return kResidualNames; }

double residual_value(const ResidualRow& r, const std::string& name) {
  if (name == "eikonal") return r.eikonal;
  if (name == "g_LL") return r.g_LL;
  if (name == "g_XX") return r.g_XX;
  if (name == "g_LX") return r.g_LX;
  if (name == "mu_inv_sq") return r.mu_inv_sq;
  if (name == "mu_du_X") return r.mu_du_X;
  if (name == "transport") return r.transport;
  if (name == "lnupsilon_trchi") return r.lnupsilon_trchi;
  if (name == "jacobian") return r.jacobian;
  if (name == "char_u") return r.char_u;
  throw Error(Errc::ValidationError, "unknown residual identity " + name);
}

void write_series(const std::string& path, const std::vector<SeriesRow>& rows) {
  CsvWriter w(path, kSeriesHeader);
  for (const auto& r : rows)
    w.row({r.t, r.mu_star, r.max_abs_d1psi, r.max_abs_LPsi, r.max_abs_d2psi, r.argmin_x1, r.argmin_x2,
           r.xbreve_psi_at_min, r.max_Lmu_low, static_cast<double>(r.n_low)});
}

void write_chars(const std::string& path, const std::vector<CharRecord>& rows) {
  CsvWriter w(path, kCharsHeader);
  for (const auto& r : rows)
    w.row({static_cast<double>(r.id), static_cast<double>(r.role), r.u0, r.theta0, r.t, r.x1, r.x2, r.mu_char,
           r.upsilon, r.psi, r.mu_field, r.u_field});
}

void write_residuals(const std::string& path, const std::vector<ResidualRow>& rows) {
  CsvWriter w(path, residual_header());
  for (const auto& r : rows)
    w.row({r.t, r.mu_star, r.eikonal, r.g_LL, r.g_XX, r.g_LX, r.mu_inv_sq, r.mu_du_X, r.transport,
           r.lnupsilon_trchi, r.jacobian, r.char_u});
}

std::vector<SeriesRow> read_series(const std::string& path) {
  const CsvTable t = read_csv(path);
  check_header(t, kSeriesHeader, path);
  std::vector<SeriesRow> out;
  out.reserve(t.rows.size());
  for (const auto& v : t.rows) {
    SeriesRow r;
    r.t = v[0];
    r.mu_star = v[1];
    r.max_abs_d1psi = v[2];
    r.max_abs_LPsi = v[3];
    r.max_abs_d2psi = v[4];
    r.argmin_x1 = v[5];
    r.argmin_x2 = v[6];
    r.xbreve_psi_at_min = v[7];
    r.max_Lmu_low = v[8];
    r.n_low = static_cast<long>(v[9]);
    out.push_back(r);
  }
  return out;
}

std::vector<CharRecord> read_chars(const std::string& path) {
  const CsvTable t = read_csv(path);
  check_header(t, kCharsHeader, path);
  std::vector<CharRecord> out;
  out.reserve(t.rows.size());
  for (const auto& v : t.rows) {
    CharRecord r;
    r.id = static_cast<int>(v[0]);
    r.role = static_cast<int>(v[1]);
    r.u0 = v[2];
    r.theta0 = v[3];
    r.t = v[4];
    r.x1 = v[5];
    r.x2 = v[6];
    r.mu_char = v[7];
    r.upsilon = v[8];
    r.psi = v[9];
    r.mu_field = v[10];
    r.u_field = v[11];
    out.push_back(r);
  }
  return out;
}

std::vector<ResidualRow> read_residuals(const std::string& path) {
  const CsvTable t = read_csv(path);
  check_header(t, residual_header(), path);
  std::vector<ResidualRow> out;
  out.reserve(t.rows.size());
  for (const auto& v : t.rows) {
    ResidualRow r;
    r.t = v[0];
    r.mu_star = v[1];
    r.eikonal = v[2];
    r.g_LL = v[3];
    r.g_XX = v[4];
    r.g_LX = v[5];
    r.mu_inv_sq = v[6];
    r.mu_du_X = v[7];
    r.transport = v[8];
    r.lnupsilon_trchi = v[9];
    r.jacobian = v[10];
    r.char_u = v[11];
    out.push_back(r);
  }
  return out;
}

void write_tables(const std::string& dir, const RunTables& t) {
  ensure_directory(dir);
  write_series(dir + "/series.csv", t.series);
  write_chars(dir + "/chars.csv", t.chars);
  write_residuals(dir + "/residuals.csv", t.residuals);
}

RunTables read_tables(const std::string& dir) {
  RunTables t;
  t.series = read_series(dir + "/series.csv");
  t.chars = read_chars(dir + "/chars.csv");
  t.residuals = read_residuals(dir + "/residuals.csv");
  return t;
}

}  // namespace shock
