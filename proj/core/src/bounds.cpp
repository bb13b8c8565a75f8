#include "eqtri/bounds.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace eqtri {

namespace {

constexpr double kMaxCondition = 1e12;

double symmetric_condition(const Eigen::MatrixXd& m) {
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().cwiseAbs().maxCoeff();
  return lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
}

}  // namespace

double link_information(double range_m, int transmitter, int beacon, const SignalParams& sig) {
  const double K = sig.K;
  const double cts = sig.range_resolution();
  const double r = range_m;
  const double pre = sig.psi(transmitter, beacon) * std::numbers::pi * sig.roots[transmitter] /
                     (sig.sigma(transmitter, beacon) * K * cts);
  if (sig.K % 2 == 1) {
    const double bracket = 4.0 * K / (cts * cts) - 4.0 * K * K / (cts * r) +
                           K * (2.0 * K - 1.0) * (2.0 * K + 1.0) / (3.0 * r * r);
    return 2.0 * pre * pre * bracket;
  }
  const double bracket = K / (cts * cts) - K * (K - 1.0) / (cts * r) +
                         K * (K - 1.0) * (2.0 * K - 1.0) / (6.0 * r * r);
  return 8.0 * pre * pre * bracket;
}

std::array<Mat3, 3> fim_blocks(const Mat3& x, const BeaconSet& beacons, const SignalParams& sig) {
  std::array<Mat3, 3> blocks;
  for (int i = 0; i < 3; ++i) {
    blocks[i].setZero();
    for (int j = 0; j < 4; ++j) {
      const Vec3 diff = x.col(i) - beacons.beacon(j);
      const double r = diff.norm();
      if (!(r > 0.0)) {
        throw DegenerateGeometry("transmitter " + std::to_string(i + 1) + " coincides with beacon " +
                                 std::to_string(j + 1));
      }
      blocks[i] += link_information(r, i, j, sig) * diff * diff.transpose();
    }
  }
  return blocks;
}

Mat9 assemble_fim(const std::array<Mat3, 3>& blocks) {
  Mat9 j = Mat9::Zero();
  for (int i = 0; i < 3; ++i) {
    j.block<3, 3>(3 * i, 3 * i) = blocks[i];
  }
  return j;
}

Mat9 crb(const Mat9& j) {
  const Mat9 sym = 0.5 * (j + j.transpose());
  if (!(symmetric_condition(sym) <= kMaxCondition)) {
    throw SingularFim("Fisher information is singular or ill-conditioned");
  }
  const Mat9 inv = sym.ldlt().solve(Mat9::Identity());
  return 0.5 * (inv + inv.transpose());
}

Vec3 side_constraints(const Mat3& x, double side) {
  const double d2 = side * side;
  return {(x.col(0) - x.col(1)).squaredNorm() - d2, (x.col(1) - x.col(2)).squaredNorm() - d2,
          (x.col(2) - x.col(0)).squaredNorm() - d2};
}

Mat3x9 constraint_jacobian(const Mat3& x) {
  const Vec3 e12 = x.col(0) - x.col(1);
  const Vec3 e23 = x.col(1) - x.col(2);
  const Vec3 e31 = x.col(2) - x.col(0);
  Mat3x9 q = Mat3x9::Zero();
  q.block<1, 3>(0, 0) = 2.0 * e12.transpose();
  q.block<1, 3>(0, 3) = -2.0 * e12.transpose();
  q.block<1, 3>(1, 3) = 2.0 * e23.transpose();
  q.block<1, 3>(1, 6) = -2.0 * e23.transpose();
  q.block<1, 3>(2, 0) = -2.0 * e31.transpose();
  q.block<1, 3>(2, 6) = 2.0 * e31.transpose();
  return q;
}

Mat9x6 nullspace_basis(const Mat3x9& q) {
  const Eigen::Matrix<double, 9, 3> qt = q.transpose();
  Eigen::ColPivHouseholderQR<Eigen::Matrix<double, 9, 3>> qr(qt);
  qr.setThreshold(1e-10);
  if (qr.rank() < 3) {
    throw RankDeficient("constraint Jacobian has rank " + std::to_string(qr.rank()) + " < 3");
  }
  const Mat9 full = qr.householderQ();
  return full.rightCols<6>();
}

Mat9x6 explicit_null_vectors(const Mat3x9& q) {
  // Q = [a, -a, 0; 0, b, -b; -c, 0, c] row-wise.
  const double a1 = q(0, 0), a2 = q(0, 1), a3 = q(0, 2);
  const double b1 = q(1, 3), b2 = q(1, 4), b3 = q(1, 5);
  const double c1 = q(2, 6), c2 = q(2, 7), c3 = q(2, 8);
  const double m = a2 * c1 - a1 * c2;

  Mat9x6 p = Mat9x6::Zero();
  p.col(0).head<3>() << a3 * c2 - a2 * c3, a1 * c3 - a3 * c1, a2 * c1 - a1 * c2;

  p(0, 1) = c2 * (a1 * b2 - a2 * b1);
  p(1, 1) = c1 * (a2 * b1 - a1 * b2);
  p(3, 1) = -b2 * m;
  p(4, 1) = b1 * m;

  p(0, 2) = c2 * (a1 * b3 - a3 * b1);
  p(1, 2) = c1 * (a3 * b1 - a1 * b3);
  p(3, 2) = -b3 * m;
  p(5, 2) = b1 * m;

  p(0, 3) = 1.0;
  p(3, 3) = 1.0;
  p(6, 3) = 1.0;

  p(0, 4) = c2 * (a2 * b1 - a1 * b2);
  p(1, 4) = a1 * (b2 * c1 - b1 * c2);
  p(3, 4) = b2 * m;
  p(7, 4) = b1 * m;

  p(0, 5) = a2 * b1 * c3 - a1 * b3 * c2;
  p(1, 5) = a1 * (b3 * c1 - b1 * c3);
  p(3, 5) = b3 * m;
  p(8, 5) = b1 * m;
  return p;
}

Mat9 ccrb(const Mat9& j, const Mat9x6& psi) {
  Eigen::Matrix<double, 6, 6> reduced = psi.transpose() * j * psi;
  reduced = 0.5 * (reduced + reduced.transpose()).eval();
  if (!(symmetric_condition(reduced) <= kMaxCondition)) {
    throw SingularProjectedFim("projected Fisher information is singular or ill-conditioned");
  }
  const Eigen::Matrix<double, 6, 6> inv = reduced.ldlt().solve(Eigen::Matrix<double, 6, 6>::Identity());
  const Mat9 out = psi * inv * psi.transpose();
  return 0.5 * (out + out.transpose());
}

FisherBundle fisher_bundle(const Mat3& x, const BeaconSet& beacons, const SignalParams& sig) {
  FisherBundle b;
  b.theta = stack_columns(x);
  b.j = assemble_fim(fim_blocks(x, beacons, sig));
  b.crb = crb(b.j);
  b.q = constraint_jacobian(x);
  b.psi = nullspace_basis(b.q);
  b.ccrb = ccrb(b.j, b.psi);
  return b;
}

}  // namespace eqtri
