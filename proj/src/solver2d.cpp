#include "shockform/solver2d.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <sstream>

#include "shockform/errors.hpp"
#include "shockform/geometry.hpp"
#include "shockform/interp.hpp"
#include "shockform/io.hpp"
#include "shockform/parallel.hpp"

namespace shock {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}  // namespace

Grid2D make_grid(int nx, int ny, double x_min, double x_max, double t_max) {
  if (nx < 16) throw Error(Errc::ValidationError, "grid.nx: must be at least 16");
  if (ny < 8) throw Error(Errc::ValidationError, "grid.ny: must be at least 8");
  if (!(x_max - x_min >= 1.0 + 2.0 * t_max)) {
    std::ostringstream os;
    os << "grid.x_max: domain must satisfy x_max - x_min >= 1 + 2 t_max (got " << x_max - x_min
       << " < " << 1.0 + 2.0 * t_max << ")";
    throw Error(Errc::ValidationError, os.str());
  }
  if (!(x_min <= 0.0 && x_max >= 1.0))
    throw Error(Errc::ValidationError, "grid.x_min: domain must contain the data support [0, 1]");
  Grid2D g;
  g.nx = nx;
  g.ny = ny;
  g.x_min = x_min;
  g.x_max = x_max;
  g.dx = (x_max - x_min) / (nx - 1);
  g.dy = 1.0 / ny;
  return g;
}

DataPoint data_point(const DataSpec& spec, double x1, double x2) {
  DataPoint d;
  if (spec.kind == "zero") return d;
  const auto p = spec.profile.eval(1.0 - x1);
  const double eps = spec.kind == "hierarchy" ? spec.eps : 0.0;
  const double k = kTwoPi * spec.mode;
  const double ang = 1.0 + eps * std::cos(k * x2);
  d.psi = p[0] * ang;
  d.d1 = -p[1] * ang;
  d.d2 = -p[0] * eps * k * std::sin(k * x2);
  d.pi_shape = spec.profile.amplitude != 0.0 ? p[0] / spec.profile.amplitude : 0.0;
  return d;
}

namespace {

double sample_GLL_Xbreve(const MetricModel& model, const DataSpec& spec, double u, double th) {
  const DataPoint d = data_point(spec, 1.0 - u, th);
  const MetricSample s = model.sample(d.psi);
  const FrameState f = build_frame_spatial(s, d.psi, -1.0, 0.0);
  const double G_LL = f.L.dot(s.G * f.L);
  return G_LL * f.mu * (f.X[1] * d.d1 + f.X[2] * d.d2);
}

}  // namespace

std::pair<double, std::pair<double, double>> initial_delta_star_at(const MetricModel& model,
                                                                   const DataSpec& spec) {
  if (spec.kind == "zero") return {0.0, {0.5, 0.0}};
  const int nu = 2048;
  const int nth = spec.kind == "hierarchy" && spec.eps != 0.0 ? 64 : 1;
  std::vector<double> samples(static_cast<std::size_t>(nu) * nth);
  parallel_for(static_cast<std::size_t>(nu), [&](std::size_t b, std::size_t e) {
    for (std::size_t a = b; a < e; ++a) {
      const double u = (a + 0.5) / nu;
      for (int k = 0; k < nth; ++k)
        samples[a * nth + k] = sample_GLL_Xbreve(model, spec, u, static_cast<double>(k) / nth);
    }
  }, 64);
  const long at = delta_star_argmax(samples);
  const double ds = delta_star(samples);
  if (at < 0) return {0.0, {0.5, 0.0}};
  const double u = (at / nth + 0.5) / nu;
  const double th = static_cast<double>(at % nth) / nth;
  return {ds, {u, th}};
}

double initial_delta_star(const MetricModel& model, const DataSpec& spec) {
  return initial_delta_star_at(model, spec).first;
}

DataSpec resolve_amplitude(const MetricModel& model, const DataSpec& spec) {
  if (!(spec.delta_target > 0.0) || spec.kind == "zero") return spec;
  DataSpec s = spec;
  auto f = [&](double a) {
    s.profile.amplitude = a;
    return initial_delta_star(model, s) - spec.delta_target;
  };
  // delta_star is close to linear in the amplitude; secant from a unit-slope guess.
  double a0 = 0.0, f0 = -spec.delta_target;
  double a1 = 0.01, f1 = f(a1);
  for (int it = 0; it < 40 && std::abs(f1) > 1e-13 * spec.delta_target; ++it) {
    if (f1 == f0) break;
    const double a2 = a1 - f1 * (a1 - a0) / (f1 - f0);
    a0 = a1;
    f0 = f1;
    a1 = a2;
    f1 = f(a1);
  }
  if (!(std::abs(f1) <= 1e-8 * spec.delta_target))
    throw Error(Errc::ValidationError, "data.delta: cannot reach the requested delta_star");
  s.profile.amplitude = a1;
  return s;
}

// ---------------------------------------------------------------------------
// Spatial discretization.

namespace {

struct Stencil {
  const Grid2D& g;
  int order;  // upwind order for u: 2, or 3 for the upwind-biased stencil
  double idx1, idx2, idy1, idy2;
  Stencil(const Grid2D& grid, int eikonal_order)
      : g(grid),
        order(eikonal_order),
        idx1(1.0 / (12.0 * grid.dx)),
        idx2(1.0 / (12.0 * grid.dx * grid.dx)),
        idy1(1.0 / (12.0 * grid.dy)),
        idy2(1.0 / (12.0 * grid.dy * grid.dy)) {}

  int jw(int j) const { return (j % g.ny + g.ny) % g.ny; }
  const double* row(const double* f, int j) const { return f + static_cast<std::size_t>(jw(j)) * g.nx; }

  /// d/dx1 on a row: fourth order inside, second order next to the ends.
  double dx(const double* r, int i) const {
    if (i >= 2 && i <= g.nx - 3) return (r[i - 2] - 8.0 * r[i - 1] + 8.0 * r[i + 1] - r[i + 2]) * idx1;
    if (i == 0) return (-3.0 * r[0] + 4.0 * r[1] - r[2]) / (2.0 * g.dx);
    if (i == g.nx - 1) return (3.0 * r[i] - 4.0 * r[i - 1] + r[i - 2]) / (2.0 * g.dx);
    return (r[i + 1] - r[i - 1]) / (2.0 * g.dx);
  }
  double dxx(const double* r, int i) const {
    if (i >= 2 && i <= g.nx - 3)
      return (-r[i - 2] + 16.0 * r[i - 1] - 30.0 * r[i] + 16.0 * r[i + 1] - r[i + 2]) * idx2;
    if (i == 0 || i == g.nx - 1) return 0.0;
    return (r[i - 1] - 2.0 * r[i] + r[i + 1]) / (g.dx * g.dx);
  }
  double dy(const double* f, int i, int j) const {
    return (row(f, j - 2)[i] - 8.0 * row(f, j - 1)[i] + 8.0 * row(f, j + 1)[i] - row(f, j + 2)[i]) * idy1;
  }
  double dyy(const double* f, int i, int j) const {
    return (-row(f, j - 2)[i] + 16.0 * row(f, j - 1)[i] - 30.0 * row(f, j)[i] + 16.0 * row(f, j + 1)[i] -
            row(f, j + 2)[i]) *
           idy2;
  }
  double dxy(const double* f, int i, int j) const {
    return (dx(row(f, j - 2), i) - 8.0 * dx(row(f, j - 1), i) + 8.0 * dx(row(f, j + 1), i) -
            dx(row(f, j + 2), i)) *
           idy1;
  }
  /// Second-order one-sided derivatives of u, upwind with respect to the sign of v.
  double ux_upwind(const double* r, int i, double v) const {
    const int n = g.nx;
    // Boundary nodes: outflow one-sided, inflow extrapolated from the interior
    // so that the node never feeds its own update.
    if (i == 0) {
      if (v <= 0.0) return (-3.0 * r[0] + 4.0 * r[1] - r[2]) / (2.0 * g.dx);
      return (r[2] - r[1]) / g.dx - 1.5 * (r[3] - 2.0 * r[2] + r[1]) / g.dx;
    }
    if (i == n - 1) {
      if (v >= 0.0) return (3.0 * r[i] - 4.0 * r[i - 1] + r[i - 2]) / (2.0 * g.dx);
      return (r[i - 1] - r[i - 2]) / g.dx + 1.5 * (r[i - 1] - 2.0 * r[i - 2] + r[i - 3]) / g.dx;
    }
    if (order == 3 && i >= 2 && i <= n - 3) {
      if (v > 0.0) return (r[i - 2] - 6.0 * r[i - 1] + 3.0 * r[i] + 2.0 * r[i + 1]) / (6.0 * g.dx);
      return (-2.0 * r[i - 1] - 3.0 * r[i] + 6.0 * r[i + 1] - r[i + 2]) / (6.0 * g.dx);
    }
    if (v > 0.0 && i >= 2) return (3.0 * r[i] - 4.0 * r[i - 1] + r[i - 2]) / (2.0 * g.dx);
    if (v <= 0.0 && i <= n - 3) return (-3.0 * r[i] + 4.0 * r[i + 1] - r[i + 2]) / (2.0 * g.dx);
    return (r[i + 1] - r[i - 1]) / (2.0 * g.dx);
  }
  double uy_upwind(const double* f, int i, int j, double v) const {
    if (order == 3) {
      if (v > 0.0)
        return (row(f, j - 2)[i] - 6.0 * row(f, j - 1)[i] + 3.0 * row(f, j)[i] + 2.0 * row(f, j + 1)[i]) /
               (6.0 * g.dy);
      return (-2.0 * row(f, j - 1)[i] - 3.0 * row(f, j)[i] + 6.0 * row(f, j + 1)[i] - row(f, j + 2)[i]) /
             (6.0 * g.dy);
    }
    if (v > 0.0) return (3.0 * row(f, j)[i] - 4.0 * row(f, j - 1)[i] + row(f, j - 2)[i]) / (2.0 * g.dy);
    return (-3.0 * row(f, j)[i] + 4.0 * row(f, j + 1)[i] - row(f, j + 2)[i]) / (2.0 * g.dy);
  }
  double ux_centered(const double* r, int i) const {
    if (i == 0) return (-3.0 * r[0] + 4.0 * r[1] - r[2]) / (2.0 * g.dx);
    if (i == g.nx - 1) return (3.0 * r[i] - 4.0 * r[i - 1] + r[i - 2]) / (2.0 * g.dx);
    return (r[i + 1] - r[i - 1]) / (2.0 * g.dx);
  }
  double uy_centered(const double* f, int i, int j) const {
    return (row(f, j + 1)[i] - row(f, j - 1)[i]) / (2.0 * g.dy);
  }
  /// Kreiss-Oliger sixth-difference operator (without the sigma/64h factor).
  double ko_x(const double* r, int i) const {
    if (i < 3 || i > g.nx - 4) return 0.0;
    return r[i - 3] - 6.0 * r[i - 2] + 15.0 * r[i - 1] - 20.0 * r[i] + 15.0 * r[i + 1] - 6.0 * r[i + 2] +
           r[i + 3];
  }
  double ko_y(const double* f, int i, int j) const {
    return row(f, j - 3)[i] - 6.0 * row(f, j - 2)[i] + 15.0 * row(f, j - 1)[i] - 20.0 * row(f, j)[i] +
           15.0 * row(f, j + 1)[i] - 6.0 * row(f, j + 2)[i] + row(f, j + 3)[i];
  }
};

/// Eikonal data at a point from spatial derivatives of u.
struct EikonalLocal {
  double p, mu, L1, L2;
};

inline EikonalLocal eikonal_local(const Mat3& gi, double u1, double u2) {
  const double b = gi(0, 1) * u1 + gi(0, 2) * u2;
  const double c = gi(1, 1) * u1 * u1 + 2.0 * gi(1, 2) * u1 * u2 + gi(2, 2) * u2 * u2;
  const double disc = b * b + c;
  if (!(disc > 0.0)) throw Error(Errc::DegenerateCharacteristic, "b^2 + c <= 0 in the eikonal update");
  const double r = std::sqrt(disc);
  const double p = b + r;
  const double mu = 1.0 / r;
  return {p, mu, -mu * (gi(1, 0) * p + gi(1, 1) * u1 + gi(1, 2) * u2),
          -mu * (gi(2, 0) * p + gi(2, 1) * u1 + gi(2, 2) * u2)};
}

/// Per-point fields needed by the characteristics and the diagnostics.
struct Aux {
  std::vector<double> mu, L1, L2;
  std::vector<double> A, B;            // L mu = A + mu B
  std::vector<double> th1, th2, half;  // unit torus vector and G(th,th) L psi / 2
  std::vector<double> trchi;
  std::vector<double> d1psi, d2psi, Lpsi, xbpsi;
  std::vector<double> vmax;
  void resize(std::size_t n) {
    for (auto* v : {&mu, &L1, &L2, &A, &B, &th1, &th2, &half, &trchi, &d1psi, &d2psi, &Lpsi, &xbpsi, &vmax})
      v->assign(n, 0.0);
  }
};

class Evolver {
 public:
  Evolver(const MetricModel& model, const Grid2D& grid, double dissipation, int eikonal_order)
      : model_(model), g_(grid), st_(grid, eikonal_order), sigma_(dissipation) {
    aux_.resize(grid.size());
  }

  Aux& aux() { return aux_; }

  /// Time derivatives of (psi, pi, u); fills aux (all points).
  void rhs(const double* psi, const double* pi, const double* u, double* rpsi, double* rpi, double* ru) {
    const int nx = g_.nx;
    const double ko_x = sigma_ / (64.0 * g_.dx), ko_y = sigma_ / (64.0 * g_.dy);
    parallel_for(static_cast<std::size_t>(g_.ny), [&](std::size_t jb, std::size_t je) {
      for (int j = static_cast<int>(jb); j < static_cast<int>(je); ++j) {
        const double* rp = st_.row(psi, j);
        const double* rq = st_.row(pi, j);
        const double* ruu = st_.row(u, j);
        for (int i = 0; i < nx; ++i) {
          const std::size_t k = g_.idx(i, j);
          const double ps = rp[i], q = rq[i];
          const double p1 = st_.dx(rp, i), p2 = st_.dy(psi, i, j);
          const MetricSample s = model_.sample_unchecked(ps);
          const Mat3& gi = s.ginv;
          // Eikonal: direction from centered differences, update from upwind ones.
          const EikonalLocal c0 = eikonal_local(gi, st_.ux_centered(ruu, i), st_.uy_centered(u, i, j));
          const double u1 = st_.ux_upwind(ruu, i, c0.L1), u2 = st_.uy_upwind(u, i, j, c0.L2);
          const EikonalLocal e = eikonal_local(gi, u1, u2);
          ru[k] = e.p;
          aux_.mu[k] = e.mu;
          aux_.L1[k] = e.L1;
          aux_.L2[k] = e.L2;
          {
            const double b1 = gi(0, 1), b2 = gi(0, 2);
            const double tr = gi(1, 1) + gi(2, 2);
            const double det = gi(1, 1) * gi(2, 2) - gi(1, 2) * gi(1, 2);
            const double lmax = 0.5 * tr + std::sqrt(std::max(0.0, 0.25 * tr * tr - det));
            const double bn2 = b1 * b1 + b2 * b2;
            aux_.vmax[k] = std::sqrt(bn2) + std::sqrt(bn2 + lmax);
          }
          const double Lpsi = q + e.L1 * p1 + e.L2 * p2;
          // X = -L - (g^-1)^{0.}
          const double X1 = -e.L1 - gi(0, 1), X2 = -e.L2 - gi(0, 2);
          const double xb = e.mu * (X1 * p1 + X2 * p2);
          aux_.d1psi[k] = p1;
          aux_.d2psi[k] = p2;
          aux_.Lpsi[k] = Lpsi;
          aux_.xbpsi[k] = xb;
          {
            const Vec3 L(1.0, e.L1, e.L2), X(0.0, X1, X2);
            const Vec3 GL = s.G * L;
            const double G_LL = L.dot(GL), G_LX = X.dot(GL);
            aux_.A[k] = 0.5 * G_LL * xb;
            aux_.B[k] = -(0.5 * G_LL + G_LX) * Lpsi;
            const double t1 = u2, t2 = -u1;
            const double n2 = s.g(1, 1) * t1 * t1 + 2.0 * s.g(1, 2) * t1 * t2 + s.g(2, 2) * t2 * t2;
            const double nn = 1.0 / std::sqrt(n2);
            aux_.th1[k] = t1 * nn;
            aux_.th2[k] = t2 * nn;
            const double Gs = (s.G(1, 1) * t1 * t1 + 2.0 * s.G(1, 2) * t1 * t2 + s.G(2, 2) * t2 * t2) * nn * nn;
            aux_.half[k] = 0.5 * Gs * Lpsi;
          }
          if (i == 0 || i == nx - 1) {
            rpsi[k] = 0.0;
            rpi[k] = 0.0;
            continue;
          }
          const double q1 = st_.dx(rq, i), q2 = st_.dy(pi, i, j);
          const double p11 = st_.dxx(rp, i), p22 = st_.dyy(psi, i, j), p12 = st_.dxy(psi, i, j);
          const Vec3 dpsi(q, p1, p2);
          const Vec3 w = gi * dpsi;
          const double Q = dpsi.dot(w);
          const double Gww = w.dot(s.G * w);
          const double trG = (gi.cwiseProduct(s.G)).sum();
          double a = 2.0 * (gi(0, 1) * q1 + gi(0, 2) * q2) + gi(1, 1) * p11 + 2.0 * gi(1, 2) * p12 +
                     gi(2, 2) * p22 - Gww + 0.5 * trG * Q;
          double b = q;
          if (sigma_ > 0.0) {
            a += ko_x * st_.ko_x(rq, i) + ko_y * st_.ko_y(pi, i, j);
            b += ko_x * st_.ko_x(rp, i) + ko_y * st_.ko_y(psi, i, j);
          }
          rpsi[k] = b;
          rpi[k] = a;
        }
      }
    }, 1);
  }

  /// tr chi on columns [ilo, ihi] from the L fields in aux.
  void trchi(const double* psi, int ilo, int ihi) {
    ilo = std::max(0, ilo);
    ihi = std::min(g_.nx - 1, ihi);
    const double* L1 = aux_.L1.data();
    const double* L2 = aux_.L2.data();
    for (int j = 0; j < g_.ny; ++j) {
      for (int i = ilo; i <= ihi; ++i) {
        const std::size_t k = g_.idx(i, j);
        const double t1 = aux_.th1[k], t2 = aux_.th2[k];
        const double dL1 = t1 * st_.dx(st_.row(L1, j), i) + t2 * st_.dy(L1, i, j);
        const double dL2 = t1 * st_.dx(st_.row(L2, j), i) + t2 * st_.dy(L2, i, j);
        const MetricSample s = model_.sample_unchecked(psi[k]);
        const double chi = s.g(1, 1) * dL1 * t1 + s.g(1, 2) * (dL1 * t2 + dL2 * t1) + s.g(2, 2) * dL2 * t2;
        aux_.trchi[k] = chi + aux_.half[k];
      }
    }
  }

  /// Bicubic interpolation of a grid field at (x1, x2); x2 periodic.
  double interp(const std::vector<double>& f, double x1, double x2) const {
    const double rx = (x1 - g_.x_min) / g_.dx;
    int i = static_cast<int>(std::floor(rx));
    i = std::max(1, std::min(g_.nx - 3, i));
    const double sx = rx - i;
    const double ry = x2 / g_.dy;
    const int j = static_cast<int>(std::floor(ry));
    const double sy = ry - j;
    const auto wx = cubic_weights(sx), wy = cubic_weights(sy);
    double v = 0.0;
    for (int b = 0; b < 4; ++b) {
      const double* r = st_.row(f.data(), j - 1 + b);
      double acc = 0.0;
      for (int a = 0; a < 4; ++a) acc += wx[a] * r[i - 1 + a];
      v += wy[b] * acc;
    }
    return v;
  }

  const Stencil& stencil() const { return st_; }

 private:
  const MetricModel& model_;
  const Grid2D& g_;
  Stencil st_;
  double sigma_;
  Aux aux_;
};

void axpy(std::vector<double>& out, const std::vector<double>& a, double c, const std::vector<double>& b) {
  const std::size_t n = out.size();
  for (std::size_t k = 0; k < n; ++k) out[k] = a[k] + c * b[k];
}

/// Characteristic state vectors.
struct Chars {
  std::vector<int> role;
  std::vector<double> u0, th0;
  std::vector<double> x1, x2, mu, lnu;
  std::vector<char> alive;
  std::size_t size() const { return x1.size(); }
};

void char_rhs(const Evolver& ev, const Aux& aux, const Chars& c, const std::vector<double>& x1,
              const std::vector<double>& x2, const std::vector<double>& mu, std::vector<double>& k1,
              std::vector<double>& k2, std::vector<double>& km, std::vector<double>& kl) {
  for (std::size_t n = 0; n < c.size(); ++n) {
    if (!c.alive[n]) {
      k1[n] = k2[n] = km[n] = kl[n] = 0.0;
      continue;
    }
    const double y = x2[n] - std::floor(x2[n]);
    k1[n] = ev.interp(aux.L1, x1[n], y);
    k2[n] = ev.interp(aux.L2, x1[n], y);
    km[n] = ev.interp(aux.A, x1[n], y) + mu[n] * ev.interp(aux.B, x1[n], y);
    kl[n] = ev.interp(aux.trchi, x1[n], y);
  }
}

double periodic_gap(double a, double b) {
  double d = a - b;
  return d - std::round(d);
}

/// Three-point derivative at the middle of nonuniform samples.
double mid_derivative(const double t[3], const double f[3]) {
  const double h1 = t[1] - t[0], h2 = t[2] - t[1];
  return -h2 / (h1 * (h1 + h2)) * f[0] + (h2 - h1) / (h1 * h2) * f[1] + h1 / (h2 * (h1 + h2)) * f[2];
}

}  // namespace

// ---------------------------------------------------------------------------

State2D init_state(const MetricModel& model, const DataSpec& spec, const Grid2D& grid) {
  State2D s;
  const std::size_t n = grid.size();
  s.psi.assign(n, 0.0);
  s.pi.assign(n, 0.0);
  s.u.assign(n, 0.0);
  s.mu.assign(n, 1.0);
  s.L1.assign(n, 1.0);
  s.L2.assign(n, 0.0);
  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) {
      const std::size_t k = grid.idx(i, j);
      const double x1 = grid.x1(i);
      s.u[k] = 1.0 - x1;
      const DataPoint d = data_point(spec, x1, grid.x2(j));
      if ((x1 < 0.0 || x1 > 1.0) && (std::abs(d.psi) > 1e-14 || std::abs(d.pi_shape) > 1e-14)) {
        std::ostringstream os;
        os << "data nonzero at x1 = " << x1;
        throw Error(Errc::SupportViolation, os.str());
      }
      const MetricSample ms = model.sample(d.psi);
      const FrameState f = build_frame_spatial(ms, d.psi, -1.0, 0.0);
      s.psi[k] = d.psi;
      s.pi[k] = spec.lpsi * d.pi_shape - f.L[1] * d.d1 - f.L[2] * d.d2;
      s.mu[k] = f.mu;
      s.L1[k] = f.L[1];
      s.L2[k] = f.L[2];
    }
  }
  return s;
}

namespace {

struct Work {
  std::vector<double> kp[4], kq[4], ku[4], tp, tq, tu;
  explicit Work(std::size_t n) {
    for (int r = 0; r < 4; ++r) {
      kp[r].assign(n, 0.0);
      kq[r].assign(n, 0.0);
      ku[r].assign(n, 0.0);
    }
    tp.assign(n, 0.0);
    tq.assign(n, 0.0);
    tu.assign(n, 0.0);
  }
};

/// Classical RK4 for the fields and the characteristics together. With
/// first_ready the caller has already evaluated the first stage (rhs into
/// work.k*[0], aux including tr chi on the characteristics' box).
void rk4(Evolver& ev, State2D& s, double dt, Chars* chars, int box_pad, Work& work, bool first_ready) {
  const std::size_t n = s.psi.size();
  auto& kp = work.kp;
  auto& kq = work.kq;
  auto& ku = work.ku;
  auto& tp = work.tp;
  auto& tq = work.tq;
  auto& tu = work.tu;
  const std::size_t nc = chars ? chars->size() : 0;
  std::vector<double> c1[4], c2[4], cm[4], cl[4];
  for (int r = 0; r < 4; ++r) {
    c1[r].assign(nc, 0.0);
    c2[r].assign(nc, 0.0);
    cm[r].assign(nc, 0.0);
    cl[r].assign(nc, 0.0);
  }
  std::vector<double> y1(nc), y2(nc), ym(nc);
  const Grid2D& g = ev.stencil().g;
  auto char_stage = [&](int r, const double* psi, const std::vector<double>& x1) {
    if (!chars) return;
    if (r == 0 && first_ready) {
      char_rhs(ev, ev.aux(), *chars, x1, chars->x2, chars->mu, c1[0], c2[0], cm[0], cl[0]);
      return;
    }
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::size_t m = 0; m < nc; ++m)
      if (chars->alive[m]) {
        lo = std::min(lo, x1[m]);
        hi = std::max(hi, x1[m]);
      }
    if (lo <= hi) {
      ev.trchi(psi, static_cast<int>(std::floor((lo - g.x_min) / g.dx)) - box_pad,
               static_cast<int>(std::ceil((hi - g.x_min) / g.dx)) + box_pad);
    }
    char_rhs(ev, ev.aux(), *chars, x1, r == 0 ? chars->x2 : y2, r == 0 ? chars->mu : ym, c1[r], c2[r], cm[r],
             cl[r]);
  };
  const double w[4] = {0.0, 0.5, 0.5, 1.0};
  for (int r = 0; r < 4; ++r) {
    const double* P = s.psi.data();
    const double* Q = s.pi.data();
    const double* U = s.u.data();
    if (r > 0) {
      axpy(tp, s.psi, w[r] * dt, kp[r - 1]);
      axpy(tq, s.pi, w[r] * dt, kq[r - 1]);
      axpy(tu, s.u, w[r] * dt, ku[r - 1]);
      P = tp.data();
      Q = tq.data();
      U = tu.data();
      for (std::size_t m = 0; m < nc; ++m) {
        y1[m] = chars->x1[m] + w[r] * dt * c1[r - 1][m];
        y2[m] = chars->x2[m] + w[r] * dt * c2[r - 1][m];
        ym[m] = chars->mu[m] + w[r] * dt * cm[r - 1][m];
      }
    }
    if (r > 0 || !first_ready) ev.rhs(P, Q, U, kp[r].data(), kq[r].data(), ku[r].data());
    char_stage(r, P, r == 0 ? (chars ? chars->x1 : y1) : y1);
  }
  const double h6 = dt / 6.0;
  for (std::size_t k = 0; k < n; ++k) {
    s.psi[k] += h6 * (kp[0][k] + 2.0 * kp[1][k] + 2.0 * kp[2][k] + kp[3][k]);
    s.pi[k] += h6 * (kq[0][k] + 2.0 * kq[1][k] + 2.0 * kq[2][k] + kq[3][k]);
    s.u[k] += h6 * (ku[0][k] + 2.0 * ku[1][k] + 2.0 * ku[2][k] + ku[3][k]);
  }
  for (std::size_t m = 0; m < nc; ++m) {
    if (!chars->alive[m]) continue;
    chars->x1[m] += h6 * (c1[0][m] + 2.0 * c1[1][m] + 2.0 * c1[2][m] + c1[3][m]);
    chars->x2[m] += h6 * (c2[0][m] + 2.0 * c2[1][m] + 2.0 * c2[2][m] + c2[3][m]);
    chars->mu[m] += h6 * (cm[0][m] + 2.0 * cm[1][m] + 2.0 * cm[2][m] + cm[3][m]);
    chars->lnu[m] += h6 * (cl[0][m] + 2.0 * cl[1][m] + 2.0 * cl[2][m] + cl[3][m]);
    if (chars->x1[m] < g.x_min + 3.0 * g.dx || chars->x1[m] > g.x_max - 3.0 * g.dx) chars->alive[m] = 0;
  }
  s.t += dt;
}

void refresh_derived(Evolver& ev, State2D& s) {
  const std::size_t n = s.psi.size();
  std::vector<double> a(n), b(n), c(n);
  ev.rhs(s.psi.data(), s.pi.data(), s.u.data(), a.data(), b.data(), c.data());
  s.mu = ev.aux().mu;
  s.L1 = ev.aux().L1;
  s.L2 = ev.aux().L2;
}

}  // namespace

void step(State2D& state, const MetricModel& model, const Grid2D& grid, double dt, double dissipation,
          int eikonal_order) {
  Evolver ev(model, grid, dissipation, eikonal_order);
  Work work(state.psi.size());
  rk4(ev, state, dt, nullptr, 0, work, false);
  refresh_derived(ev, state);
}

double cfl_time_step(const State2D& state, const MetricModel& model, const Grid2D& grid, double cfl) {
  Evolver ev(model, grid, 0.0, 3);
  const std::size_t n = state.psi.size();
  std::vector<double> a(n), b(n), c(n);
  ev.rhs(state.psi.data(), state.pi.data(), state.u.data(), a.data(), b.data(), c.data());
  double v = 0.0;
  for (double x : ev.aux().vmax) v = std::max(v, x);
  return cfl * std::min(grid.dx, grid.dy) / v;
}

void write_snapshot(const std::string& path, const Grid2D& grid, const State2D& s) {
  CsvWriter w(path, {"x1", "x2", "psi", "pi", "u", "mu"});
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i) {
      const std::size_t k = grid.idx(i, j);
      w.row({grid.x1(i), grid.x2(j), s.psi[k], s.pi[k], s.u[k], s.mu[k]});
    }
}

// ---------------------------------------------------------------------------

namespace {

/// Identity residual maxima over the grid at the middle of three time levels.
void grid_residuals(const MetricModel& model, const Grid2D& g, const Stencil& st, const double t[3],
                    const std::vector<double>* u[3], const std::vector<double>& psi,
                    const std::vector<double>& mu_field, ResidualRow& row) {
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 2; i <= g.nx - 3; ++i) {
      const std::size_t k = g.idx(i, j);
      const double f[3] = {(*u[0])[k], (*u[1])[k], (*u[2])[k]};
      const Vec3 du(mid_derivative(t, f), st.dx(st.row(u[1]->data(), j), i), st.dy(u[1]->data(), i, j));
      const MetricSample s = model.sample_unchecked(psi[k]);
      const Vec3 q = s.ginv * du;
      const double mu_fd = -1.0 / q[0];
      const Vec3 L = -mu_fd * q;
      Vec3 X = -L - s.ginv.row(0).transpose();
      X[0] = 0.0;
      row.eikonal = std::max(row.eikonal, std::abs(du.dot(q)));
      row.g_LL = std::max(row.g_LL, std::abs(L.dot(s.g * L)));
      row.g_XX = std::max(row.g_XX, std::abs(X.dot(s.g * X) - 1.0));
      row.g_LX = std::max(row.g_LX, std::abs(L.dot(s.g * X) + 1.0));
      const Mat2 gbi = spatial_inverse(s.g);
      const Vec2 ds(du[1], du[2]);
      const double m = mu_field[k];
      row.mu_inv_sq = std::max(row.mu_inv_sq, std::abs(1.0 / (m * m) - ds.dot(gbi * ds)));
      const Vec3 Xl = s.g * X;
      row.mu_du_X = std::max({row.mu_du_X, std::abs(m * du[1] - Xl[1]), std::abs(m * du[2] - Xl[2])});
    }
  }
}

struct CharProbe {
  double t = 0.0;
  std::vector<double> mu_field, rate, trchi, ln_ups_geo, jac_gap, u_gap;
};

}  // namespace

RunResult run(const MetricModel& model, const DataSpec& spec_in, const Grid2D& grid,
              const SolverOptions& opt) {
  const DataSpec spec = resolve_amplitude(model, spec_in);
  RunResult res;
  res.grid = grid;
  const auto [dstar, at] = initial_delta_star_at(model, spec);
  res.delta_star = dstar;
  State2D s = init_state(model, spec, grid);
  if (opt.eikonal_order != 2 && opt.eikonal_order != 3)
    throw Error(Errc::ValidationError, "run.eikonal_order: must be 2 or 3");
  Evolver ev(model, grid, opt.dissipation, opt.eikonal_order);
  const Stencil& st = ev.stencil();
  Aux& aux = ev.aux();

  // Characteristic seeds: (u, theta) lattice through the predicted blowup point.
  Chars ch;
  const double off = opt.sat_factor * grid.dx;
  res.seed_offset = off;
  if (opt.trace && spec.kind != "zero") {
    std::vector<double> us{at.first};
    const double c = spec.profile.center, w = spec.profile.width;
    for (int a = 0; a < opt.n_seed_u; ++a)
      us.push_back(opt.n_seed_u > 1 ? c - 0.8 * w + 1.6 * w * a / (opt.n_seed_u - 1) : c);
    std::vector<double> ths;
    for (int b = 0; b < std::max(1, opt.n_seed_theta); ++b) {
      double th = at.second + static_cast<double>(b) / std::max(1, opt.n_seed_theta);
      ths.push_back(th - std::floor(th));
    }
    const double du[5] = {0.0, off, -off, 0.0, 0.0};
    const double dth[5] = {0.0, 0.0, 0.0, off, -off};
    for (double u0 : us)
      for (double th0 : ths)
        for (int r = 0; r < 5; ++r) {
          const double uu = u0 + du[r];
          const double tt = th0 + dth[r];
          const DataPoint d = data_point(spec, 1.0 - uu, tt);
          const MetricSample ms = model.sample(d.psi);
          const FrameState f = build_frame_spatial(ms, d.psi, -1.0, 0.0);
          ch.role.push_back(r);
          ch.u0.push_back(uu);
          ch.th0.push_back(tt);
          ch.x1.push_back(1.0 - uu);
          ch.x2.push_back(tt);
          ch.mu.push_back(f.mu);
          ch.lnu.push_back(0.5 * std::log(ms.g(2, 2)));
          ch.alive.push_back(1);
        }
  }
  const std::size_t nc = ch.size();
  Chars* chp = nc > 0 ? &ch : nullptr;

  const std::size_t n = grid.size();
  Work work(n);
  std::vector<double> u_hist[3], psi_mid, mu_mid, mu_prev;
  double t_hist[3] = {0, 0, 0};
  int nhist = 0;
  CharProbe probes[3];
  int nprobe = 0;
  double dt_prev = 0.0, dmu_star = 0.0;
  long steps = 0;

  auto ring_push_u = [&](double t) {
    u_hist[0].swap(u_hist[1]);
    u_hist[1].swap(u_hist[2]);
    u_hist[2] = s.u;
    t_hist[0] = t_hist[1];
    t_hist[1] = t_hist[2];
    t_hist[2] = t;
    nhist = std::min(3, nhist + 1);
  };

  for (;;) {
    // Fields and derived quantities at the current time.
    ev.rhs(s.psi.data(), s.pi.data(), s.u.data(), work.kp[0].data(), work.kq[0].data(), work.ku[0].data());
    s.mu = aux.mu;
    s.L1 = aux.L1;
    s.L2 = aux.L2;
    SeriesRow row;
    row.t = s.t;
    double mu_min = std::numeric_limits<double>::infinity();
    std::size_t kmin = 0;
    double vmax = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      if (aux.mu[k] < mu_min) {
        mu_min = aux.mu[k];
        kmin = k;
      }
      row.max_abs_d1psi = std::max(row.max_abs_d1psi, std::abs(aux.d1psi[k]));
      row.max_abs_d2psi = std::max(row.max_abs_d2psi, std::abs(aux.d2psi[k]));
      row.max_abs_LPsi = std::max(row.max_abs_LPsi, std::abs(aux.Lpsi[k]));
      vmax = std::max(vmax, aux.vmax[k]);
    }
    row.mu_star = std::min(1.0, mu_min);
    row.argmin_x1 = grid.x1(static_cast<int>(kmin % grid.nx));
    row.argmin_x2 = grid.x2(static_cast<int>(kmin / grid.nx));
    row.xbreve_psi_at_min = std::abs(aux.xbpsi[kmin]);
    row.max_Lmu_low = kNaN;
    if (!mu_prev.empty() && dt_prev > 0.0) {
      for (int j = 0; j < grid.ny; ++j)
        for (int i = 2; i <= grid.nx - 3; ++i) {
          const std::size_t k = grid.idx(i, j);
          if (!(aux.mu[k] <= 0.25)) continue;
          const double y = grid.x2(j) - dt_prev * aux.L2[k];
          const double m0 = ev.interp(mu_prev, grid.x1(i) - dt_prev * aux.L1[k], y - std::floor(y));
          const double Lmu = (aux.mu[k] - m0) / dt_prev;
          row.max_Lmu_low = row.n_low == 0 ? Lmu : std::max(row.max_Lmu_low, Lmu);
          ++row.n_low;
        }
    }
    res.series.push_back(row);
    const bool shocked = row.mu_star <= opt.mu_stop || mu_min <= opt.mu_floor;
    const bool last = shocked || s.t >= opt.t_max;

    // Characteristic diagnostics at the current time.
    if (nc > 0) {
      double lo = std::numeric_limits<double>::infinity(), hi = -lo;
      for (std::size_t m = 0; m < nc; ++m)
        if (ch.alive[m]) {
          lo = std::min(lo, ch.x1[m]);
          hi = std::max(hi, ch.x1[m]);
        }
      if (lo <= hi)
        ev.trchi(s.psi.data(), static_cast<int>(std::floor((lo - grid.x_min) / grid.dx)) - 4,
                 static_cast<int>(std::ceil((hi - grid.x_min) / grid.dx)) + 4);
      CharProbe pr;
      pr.t = s.t;
      pr.mu_field.assign(nc, kNaN);
      pr.rate.assign(nc, kNaN);
      pr.trchi.assign(nc, kNaN);
      pr.ln_ups_geo.assign(nc, kNaN);
      pr.jac_gap.assign(nc, kNaN);
      pr.u_gap.assign(nc, kNaN);
      const bool keep = steps % std::max(1, opt.char_stride) == 0 || last;
      for (std::size_t m = 0; m < nc; ++m) {
        if (!ch.alive[m]) continue;
        const double y = ch.x2[m] - std::floor(ch.x2[m]);
        const double muf = ev.interp(aux.mu, ch.x1[m], y);
        const double psi = ev.interp(s.psi, ch.x1[m], y);
        const double uf = ev.interp(s.u, ch.x1[m], y);
        pr.mu_field[m] = muf;
        pr.rate[m] = ev.interp(aux.A, ch.x1[m], y) + muf * ev.interp(aux.B, ch.x1[m], y);
        pr.trchi[m] = ev.interp(aux.trchi, ch.x1[m], y);
        pr.u_gap[m] = std::abs(uf - ch.u0[m]);
        if (keep) {
          CharRecord r;
          r.id = static_cast<int>(m);
          r.role = ch.role[m];
          r.u0 = ch.u0[m];
          r.theta0 = ch.th0[m];
          r.t = s.t;
          r.x1 = ch.x1[m];
          r.x2 = ch.x2[m];
          r.mu_char = ch.mu[m];
          r.upsilon = std::exp(ch.lnu[m]);
          r.psi = psi;
          r.mu_field = muf;
          r.u_field = uf;
          res.chars.push_back(r);
        }
        // Center curves: chart derivatives from the four satellites.
        if (ch.role[m] == 0 && m + 4 < nc && ch.alive[m + 1] && ch.alive[m + 2] && ch.alive[m + 3] &&
            ch.alive[m + 4]) {
          const Vec2 xu((ch.x1[m + 1] - ch.x1[m + 2]) / (2.0 * off),
                        periodic_gap(ch.x2[m + 1], ch.x2[m + 2]) / (2.0 * off));
          const Vec2 xt((ch.x1[m + 3] - ch.x1[m + 4]) / (2.0 * off),
                        periodic_gap(ch.x2[m + 3], ch.x2[m + 4]) / (2.0 * off));
          const MetricSample ms = model.sample_unchecked(psi);
          const Mat2 gb = ms.g.block<2, 2>(1, 1);
          pr.ln_ups_geo[m] = 0.5 * std::log(xt.dot(gb * xt));
          const double det = std::abs(xu[0] * xt[1] - xu[1] * xt[0]);
          pr.jac_gap[m] = std::abs(det - jacobian_det(ch.mu[m], gb.determinant(), std::exp(ch.lnu[m])));
        }
      }
      probes[0] = std::move(probes[1]);
      probes[1] = std::move(probes[2]);
      probes[2] = std::move(pr);
      nprobe = std::min(3, nprobe + 1);
    }

    // Identity residuals at the previous time level.
    ring_push_u(s.t);
    if (nhist == 3 && res.series.size() >= 2) {
      const SeriesRow& mid = res.series[res.series.size() - 2];
      if (mid.mu_star >= opt.probe_mu_min && (steps - 1) % std::max(1, opt.probe_stride) == 0) {
        ResidualRow rr;
        rr.t = t_hist[1];
        rr.mu_star = mid.mu_star;
        const std::vector<double>* uu[3] = {&u_hist[0], &u_hist[1], &u_hist[2]};
        grid_residuals(model, grid, st, t_hist, uu, psi_mid, mu_mid, rr);
        if (nprobe == 3) {
          const double tt[3] = {probes[0].t, probes[1].t, probes[2].t};
          for (std::size_t m = 0; m < nc; ++m) {
            const double mf[3] = {probes[0].mu_field[m], probes[1].mu_field[m], probes[2].mu_field[m]};
            if (std::isnan(mf[0] + mf[1] + mf[2])) continue;
            if (ch.role[m] != 0) continue;
            rr.transport = std::max(rr.transport, std::abs(mid_derivative(tt, mf) - probes[1].rate[m]));
            rr.char_u = std::max(rr.char_u, probes[1].u_gap[m]);
            const double lu[3] = {probes[0].ln_ups_geo[m], probes[1].ln_ups_geo[m], probes[2].ln_ups_geo[m]};
            if (!std::isnan(lu[0] + lu[1] + lu[2]))
              rr.lnupsilon_trchi =
                  std::max(rr.lnupsilon_trchi, std::abs(mid_derivative(tt, lu) - probes[1].trchi[m]));
            if (!std::isnan(probes[1].jac_gap[m])) rr.jacobian = std::max(rr.jacobian, probes[1].jac_gap[m]);
          }
        }
        res.residuals.push_back(rr);
      }
    }
    psi_mid = s.psi;
    mu_mid = aux.mu;

    if (opt.snapshot_stride > 0 && steps % opt.snapshot_stride == 0 && !opt.snapshot_dir.empty()) {
      char name[64];
      std::snprintf(name, sizeof name, "/snapshot_%06ld.csv", steps);
      write_snapshot(opt.snapshot_dir + name, grid, s);
    }

    if (last) {
      res.status = shocked ? "shocked" : "t_max";
      break;
    }
    if (res.series.size() >= 2 && dt_prev > 0.0)
      dmu_star = (row.mu_star - res.series[res.series.size() - 2].mu_star) / dt_prev;
    double dt = opt.cfl * std::min(grid.dx, grid.dy) / vmax;
    if (dmu_star < 0.0) dt = std::min(dt, 0.1 * row.mu_star / -dmu_star);
    dt = std::min(dt, opt.t_max - s.t);
    if (!(dt >= 1e-9)) {
      std::ostringstream os;
      os << "time step " << dt << " underflows at t = " << s.t;
      throw Error(Errc::CFLViolation, os.str());
    }
    mu_prev = aux.mu;
    rk4(ev, s, dt, chp, 4, work, true);
    dt_prev = dt;
    ++steps;
  }
  res.steps = steps;
  res.final_state = std::move(s);
  return res;
}

}  // namespace shock
