#pragma once

#include <array>
#include <functional>
#include <string>

#include "shockform/types.hpp"

namespace shock {

enum class ModelKind { QuadraticScalar, Custom };

/// Maps psi to a symmetric 3x3 matrix (the perturbation g - m or one of its
/// psi-derivatives).
using MetricLaw = std::function<Mat3(double)>;

struct MetricDerivatives {
  Mat3 G;       // dg/dpsi
  Mat3 Gprime;  // d^2 g/dpsi^2
};

/// Everything the solvers need at one value of psi.
struct MetricSample {
  Mat3 g;
  Mat3 ginv;
  Mat3 G;
  Mat3 Gprime;
};

/// Metric law g(psi) = m + g_small(psi).
///
/// QuadraticScalar uses g_small = psi * A. Custom takes three callables for
/// g_small and its first two derivatives; derivatives are never computed
/// numerically here. A model may carry a conformal factor that enforces
/// (g^-1)^00 = -1 (see normalize_time_component).
class MetricModel {
 public:
  static MetricModel quadratic(const Mat3& A, double psi_max = 0.5);
  static MetricModel custom(MetricLaw small, MetricLaw first, MetricLaw second,
                            double psi_max = 0.5, std::string label = "custom");
  /// Custom law g_small = psi*A + psi^2*B with exact derivatives.
  static MetricModel polynomial(const Mat3& A, const Mat3& B, double psi_max = 0.5);

  ModelKind kind() const { return kind_; }
  const Mat3& coeff() const { return A_; }
  double psi_max() const { return psi_max_; }
  const std::string& label() const { return label_; }
  bool rescaled() const { return rescaled_; }
  bool normalized() const { return normalized_; }

  /// Metric, inverse and derivatives at psi with no range or signature checks.
  /// Hot path for the solvers; callers check validity separately.
  MetricSample sample_unchecked(double psi) const;
  /// As above, but raises ValidityExceeded / SignatureLost / SingularMetric.
  MetricSample sample(double psi) const;

  // Used by normalize_time_component.
  MetricModel with_time_normalization() const;
  MetricModel marked_normalized() const;

 private:
  void raw(double psi, Mat3& g, Mat3& G, Mat3& Gp) const;

  ModelKind kind_ = ModelKind::QuadraticScalar;
  Mat3 A_ = Mat3::Zero();
  Mat3 B_ = Mat3::Zero();
  bool poly_ = true;
  MetricLaw small_, first_, second_;
  double psi_max_ = 0.5;
  bool rescaled_ = false;
  bool normalized_ = false;
  std::string label_ = "quadratic";
};

/// g_00 < 0 and the spatial 2x2 block positive definite.
bool is_lorentzian(const Mat3& g);
/// 3x3 inverse; SingularMetric if |det| < 1e-14.
Mat3 invert_metric(const Mat3& g);

Mat3 evaluate_metric(const MetricModel& model, double psi);
MetricDerivatives metric_derivatives(const MetricModel& model, double psi);
Mat3 inverse_metric(const MetricModel& model, double psi);

/// Returns a model whose inverse metric has (g^-1)^00 = -1 identically. The
/// metric is multiplied by -(g^-1)^00 of the input; derivatives follow by the
/// chain rule. Models that already satisfy the condition come back unchanged.
MetricModel normalize_time_component(const MetricModel& model);

/// Lowered Christoffel symbols Gamma_{a k b} of g(psi) for a given gradient of psi.
struct Christoffel {
  std::array<double, 27> v{};
  double operator()(int a, int k, int b) const { return v[9 * a + 3 * k + b]; }
  double& at(int a, int k, int b) { return v[9 * a + 3 * k + b]; }
};
Christoffel christoffel_lowered(const MetricModel& model, double psi, const Vec3& dpsi);

/// G(L_flat, L_flat) at psi = 0 with L_flat = d_t + d_1.
double genuine_nonlinearity_coefficient(const MetricModel& model);

/// Moving-medium law g = -dt^2 + (dx1 + a psi dt)^2 + dx2^2: (g^-1)^00 = -1
/// and an exactly unit first fundamental form, so mu = 1 on the initial slice.
MetricModel moving_medium_model(double a, double psi_max = 0.5);

}  // namespace shock
