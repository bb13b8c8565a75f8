#pragma once

#include "eqtri/manifold.hpp"
#include "eqtri/types.hpp"

#include <array>

namespace eqtri {

using RangeMatrix = Eigen::Matrix<double, 3, 4>;  // r(i, j): transmitter i to beacon j
using BeaconMatrix = Eigen::Matrix<double, 4, 3>;

/// Four receivers at known positions. Rows of A are the beacon positions.
/// Rejects (SingularGeometry) sets whose [A | 1] is rank deficient or has a
/// condition number above 1e8.
class BeaconSet {
 public:
  explicit BeaconSet(const std::array<Vec3, 4>& positions);

  const BeaconMatrix& a() const { return a_; }
  const Vec4& squared_norms() const { return bsq_; }
  Vec3 beacon(int j) const { return a_.row(j).transpose(); }

  /// Room-corner layout used by the default scenario.
  static BeaconSet room_default();

 private:
  BeaconMatrix a_;
  Vec4 bsq_;
};

/// Measured ranges together with the transformed vectors y_i = (b^2 - r_i^2) / 2,
/// stored as the columns of y().
class MeasurementSet {
 public:
  MeasurementSet(const BeaconSet& beacons, const RangeMatrix& ranges);

  const RangeMatrix& ranges() const { return r_; }
  const Eigen::Matrix<double, 4, 3>& y() const { return y_; }

 private:
  RangeMatrix r_;
  Eigen::Matrix<double, 4, 3> y_;
};

RangeMatrix exact_ranges(const BeaconSet& beacons, const Mat3& x);

/// Smooth cost over R^{3x3} consumed by every solver. Implementations are
/// immutable and safe to share between threads.
class SmoothCost {
 public:
  virtual ~SmoothCost() = default;
  virtual double value(const Mat3& x) const = 0;
  virtual Mat3 gradient(const Mat3& x) const = 0;
  virtual Mat3 hessian_apply(const Mat3& x, const Mat3& direction) const = 0;
};

/// sum_i || A x_i - |x_i|^2 / 2 * 1_4 - y_i ||^2.
class LocalizationCost final : public SmoothCost {
 public:
  LocalizationCost(const BeaconSet& beacons, const MeasurementSet& meas)
      : a_(beacons.a()), y_(meas.y()) {}

  double value(const Mat3& x) const override;
  Mat3 gradient(const Mat3& x) const override;
  Mat3 hessian_apply(const Mat3& x, const Mat3& direction) const override;

  /// Per-transmitter residual vector for column i.
  Vec4 residual(const Mat3& x, int i) const;

 private:
  BeaconMatrix a_;
  Eigen::Matrix<double, 4, 3> y_;
};

/// || X - target ||_F^2.
class ProjectionCost final : public SmoothCost {
 public:
  explicit ProjectionCost(const Mat3& target) : target_(target) {}

  double value(const Mat3& x) const override { return (x - target_).squaredNorm(); }
  Mat3 gradient(const Mat3& x) const override { return 2.0 * (x - target_); }
  Mat3 hessian_apply(const Mat3&, const Mat3& direction) const override { return 2.0 * direction; }

  const Mat3& target() const { return target_; }

 private:
  Mat3 target_;
};

inline LocalizationCost localization_cost(const BeaconSet& beacons, const MeasurementSet& meas) {
  return LocalizationCost(beacons, meas);
}

inline ProjectionCost projection_cost(const Mat3& target) { return ProjectionCost(target); }

}  // namespace eqtri
