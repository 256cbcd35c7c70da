#include "shockform/model.hpp"

#include <cmath>
#include <sstream>

#include "shockform/errors.hpp"

namespace shock {

MetricModel MetricModel::quadratic(const Mat3& A, double psi_max) {
  MetricModel m;
  m.kind_ = ModelKind::QuadraticScalar;
  m.A_ = 0.5 * (A + A.transpose());
  m.psi_max_ = psi_max;
  m.label_ = "quadratic";
  return m;
}

MetricModel MetricModel::custom(MetricLaw small, MetricLaw first, MetricLaw second,
                                double psi_max, std::string label) {
  MetricModel m;
  m.kind_ = ModelKind::Custom;
  m.poly_ = false;
  m.small_ = std::move(small);
  m.first_ = std::move(first);
  m.second_ = std::move(second);
  m.psi_max_ = psi_max;
  m.label_ = std::move(label);
  return m;
}

MetricModel MetricModel::polynomial(const Mat3& A, const Mat3& B, double psi_max) {
  MetricModel m;
  m.kind_ = ModelKind::Custom;
  m.A_ = 0.5 * (A + A.transpose());
  m.B_ = 0.5 * (B + B.transpose());
  m.psi_max_ = psi_max;
  m.label_ = "polynomial";
  return m;
}

void MetricModel::raw(double psi, Mat3& g, Mat3& G, Mat3& Gp) const {
  if (poly_) {
    g = minkowski() + psi * A_ + (psi * psi) * B_;
    G = A_ + (2.0 * psi) * B_;
    Gp = 2.0 * B_;
  } else {
    g = minkowski() + small_(psi);
    G = first_(psi);
    Gp = second_(psi);
  }
}

MetricSample MetricModel::sample_unchecked(double psi) const {
  MetricSample s;
  Mat3 g, G, Gp;
  raw(psi, g, G, Gp);
  Mat3 ginv = g.inverse();
  if (rescaled_) {
    // Conformal factor phi = -h with h = (g^-1)^00, so the rescaled inverse
    // has h' = -1. d(g^-1) = -g^-1 G g^-1 and
    // d^2(g^-1) = 2 g^-1 G g^-1 G g^-1 - g^-1 G' g^-1.
    const Mat3 a = ginv * G * ginv;
    const double h = ginv(0, 0);
    const double dh = -a(0, 0);
    const double d2h = (2.0 * a * G * ginv - ginv * Gp * ginv)(0, 0);
    const double phi = -h, dphi = -dh, d2phi = -d2h;
    s.g = phi * g;
    s.G = dphi * g + phi * G;
    s.Gprime = d2phi * g + (2.0 * dphi) * G + phi * Gp;
    s.ginv = ginv / phi;
  } else {
    s.g = g;
    s.G = G;
    s.Gprime = Gp;
    s.ginv = ginv;
  }
  return s;
}

bool is_lorentzian(const Mat3& g) {
  if (!(g(0, 0) < 0.0)) return false;
  if (!(g(1, 1) > 0.0)) return false;
  return g(1, 1) * g(2, 2) - g(1, 2) * g(2, 1) > 0.0;
}

Mat3 invert_metric(const Mat3& g) {
  const double det = g.determinant();
  if (!(std::abs(det) >= 1e-14)) {
    std::ostringstream os;
    os << "metric determinant " << det;
    throw Error(Errc::SingularMetric, os.str());
  }
  return g.inverse();
}

MetricSample MetricModel::sample(double psi) const {
  if (!(std::abs(psi) <= psi_max_)) {
    std::ostringstream os;
    os << "|psi| = " << std::abs(psi) << " exceeds psi_max = " << psi_max_;
    throw Error(Errc::ValidityExceeded, os.str());
  }
  Mat3 g, G, Gp;
  raw(psi, g, G, Gp);
  if (!is_lorentzian(g)) {
    std::ostringstream os;
    os << "metric not Lorentzian at psi = " << psi;
    throw Error(Errc::SignatureLost, os.str());
  }
  invert_metric(g);
  return sample_unchecked(psi);
}

MetricModel MetricModel::with_time_normalization() const {
  MetricModel m = *this;
  m.rescaled_ = true;
  m.normalized_ = true;
  return m;
}

MetricModel MetricModel::marked_normalized() const {
  MetricModel m = *this;
  m.normalized_ = true;
  return m;
}

Mat3 evaluate_metric(const MetricModel& model, double psi) { return model.sample(psi).g; }

MetricDerivatives metric_derivatives(const MetricModel& model, double psi) {
  const MetricSample s = model.sample(psi);
  return {s.G, s.Gprime};
}

Mat3 inverse_metric(const MetricModel& model, double psi) { return model.sample(psi).ginv; }

MetricModel normalize_time_component(const MetricModel& model) {
  constexpr int kSamples = 201;
  bool already = true;
  for (int k = 0; k < kSamples; ++k) {
    const double psi = model.psi_max() * (2.0 * k / (kSamples - 1) - 1.0);
    Mat3 g = evaluate_metric(model, psi);
    const double h = invert_metric(g)(0, 0);
    if (!(h < 0.0)) {
      std::ostringstream os;
      os << "(g^-1)^00 = " << h << " at psi = " << psi;
      throw Error(Errc::DegenerateTimeComponent, os.str());
    }
    if (std::abs(h + 1.0) > 1e-14) already = false;
  }
  if (already || model.rescaled()) return model.marked_normalized();
  return model.with_time_normalization();
}

Christoffel christoffel_lowered(const MetricModel& model, double psi, const Vec3& dpsi) {
  const Mat3 G = model.sample(psi).G;
  Christoffel c;
  for (int a = 0; a < 3; ++a)
    for (int k = 0; k < 3; ++k)
      for (int b = 0; b < 3; ++b)
        c.at(a, k, b) = 0.5 * (G(k, b) * dpsi[a] + G(a, k) * dpsi[b] - G(a, b) * dpsi[k]);
  return c;
}

double genuine_nonlinearity_coefficient(const MetricModel& model) {
  const Mat3 G = model.sample(0.0).G;
  return G(0, 0) + 2.0 * G(0, 1) + G(1, 1);
}

MetricModel moving_medium_model(double a, double psi_max) {
  Mat3 A = Mat3::Zero();
  A(0, 1) = A(1, 0) = a;
  Mat3 B = Mat3::Zero();
  B(0, 0) = a * a;
  return MetricModel::polynomial(A, B, psi_max).marked_normalized();
}

}  // namespace shock
