#include "eqtri/objective.hpp"

#include "eqtri/errors.hpp"

#include <cmath>

namespace eqtri {

BeaconSet::BeaconSet(const std::array<Vec3, 4>& positions) {
  for (int j = 0; j < 4; ++j) {
    if (!positions[j].allFinite()) {
      throw SingularGeometry("beacon position is not finite");
    }
    a_.row(j) = positions[j].transpose();
    bsq_(j) = positions[j].squaredNorm();
  }
  Eigen::Matrix4d affine;
  affine << a_, Vec4::Ones();
  const Eigen::JacobiSVD<Eigen::Matrix4d> svd(affine);
  const Vec4 sv = svd.singularValues();
  if (!(sv(3) > 0.0) || sv(0) / sv(3) >= 1e8) {
    throw SingularGeometry("beacons are (nearly) coplanar");
  }
}

BeaconSet BeaconSet::room_default() {
  return BeaconSet({Vec3(0.0, 0.0, 3.0), Vec3(4.0, 0.0, 3.0), Vec3(0.0, 4.0, 3.0), Vec3(4.0, 4.0, 0.0)});
}

MeasurementSet::MeasurementSet(const BeaconSet& beacons, const RangeMatrix& ranges) : r_(ranges) {
  if (!ranges.allFinite() || (ranges.array() <= 0.0).any()) {
    throw Error("ranges must be finite and strictly positive");
  }
  for (int i = 0; i < 3; ++i) {
    y_.col(i) = 0.5 * (beacons.squared_norms() - ranges.row(i).transpose().cwiseAbs2());
  }
}

RangeMatrix exact_ranges(const BeaconSet& beacons, const Mat3& x) {
  RangeMatrix r;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 4; ++j) {
      r(i, j) = (x.col(i) - beacons.beacon(j)).norm();
    }
  }
  return r;
}

Vec4 LocalizationCost::residual(const Mat3& x, int i) const {
  const Vec3 xi = x.col(i);
  return a_ * xi - 0.5 * xi.squaredNorm() * Vec4::Ones() - y_.col(i);
}

double LocalizationCost::value(const Mat3& x) const {
  double f = 0.0;
  for (int i = 0; i < 3; ++i) {
    f += residual(x, i).squaredNorm();
  }
  return f;
}

// Column i: 2 (A - 1 x_i^T)^T r_i.
Mat3 LocalizationCost::gradient(const Mat3& x) const {
  Mat3 g;
  for (int i = 0; i < 3; ++i) {
    const Vec3 xi = x.col(i);
    const BeaconMatrix jac = a_ - Vec4::Ones() * xi.transpose();
    g.col(i) = 2.0 * jac.transpose() * residual(x, i);
  }
  return g;
}

// Column i: 2 J_i^T J_i v_i - 2 (1^T r_i) v_i with J_i = A - 1 x_i^T.
Mat3 LocalizationCost::hessian_apply(const Mat3& x, const Mat3& direction) const {
  Mat3 h;
  for (int i = 0; i < 3; ++i) {
    const Vec3 xi = x.col(i);
    const Vec3 vi = direction.col(i);
    const BeaconMatrix jac = a_ - Vec4::Ones() * xi.transpose();
    h.col(i) = 2.0 * jac.transpose() * (jac * vi) - 2.0 * residual(x, i).sum() * vi;
  }
  return h;
}

}  // namespace eqtri
