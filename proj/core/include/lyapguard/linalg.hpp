#pragma once

#include <Eigen/Dense>

namespace lyapguard {

using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat3 = Eigen::Matrix3d;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using Mat63 = Eigen::Matrix<double, 6, 3>;

/// Induced 2-norm (largest singular value) of a 3x3 matrix.
double induced_norm(const Mat3& m);

/// Smallest eigenvalue of a symmetric matrix.
double min_symmetric_eigenvalue(const Mat3& m);
double min_symmetric_eigenvalue(const Mat6& m);

/// Frobenius norm of (m + m^T).
template <typename Derived>
double symmetric_part_norm(const Eigen::MatrixBase<Derived>& m) {
  return (m + m.transpose()).norm();
}

}  // namespace lyapguard
