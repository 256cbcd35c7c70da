#pragma once

#include <Eigen/Dense>

namespace shock {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;

/// diag(-1, 1, 1) in rectangular coordinates (t, x1, x2).
inline Mat3 minkowski() {
  Mat3 m = Mat3::Identity();
  m(0, 0) = -1.0;
  return m;
}

/// Symmetric matrix from its upper triangle given row-major:
/// (a00, a01, a02, a11, a12, a22).
inline Mat3 symmetric_from_upper(const double* a) {
  Mat3 m;
  m << a[0], a[1], a[2],
       a[1], a[3], a[4],
       a[2], a[4], a[5];
  return m;
}

}  // namespace shock
