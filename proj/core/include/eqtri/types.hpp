#pragma once

#include <Eigen/Dense>

#include <random>

namespace eqtri {

using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat3 = Eigen::Matrix3d;
using Mat9 = Eigen::Matrix<double, 9, 9>;
using Vec9 = Eigen::Matrix<double, 9, 1>;

/// Ambient (3x3) representation of a tangent vector. Which tangent space it
/// belongs to is carried by the base point passed alongside it.
using TangentVector = Mat3;

/// Explicit random stream. Never global; callers own and pass it.
using Rng = std::mt19937_64;

/// Frobenius (trace) inner product <A, B> = Tr(A^T B).
inline double inner(const Mat3& a, const Mat3& b) { return (a.array() * b.array()).sum(); }

/// Stacks the columns of X into theta = [x1; x2; x3].
inline Vec9 stack_columns(const Mat3& x) {
  Vec9 theta;
  theta << x.col(0), x.col(1), x.col(2);
  return theta;
}

inline Mat3 unstack_columns(const Vec9& theta) {
  Mat3 x;
  x.col(0) = theta.segment<3>(0);
  x.col(1) = theta.segment<3>(3);
  x.col(2) = theta.segment<3>(6);
  return x;
}

}  // namespace eqtri
