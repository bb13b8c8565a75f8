#include "eqtri/solvers.hpp"

namespace eqtri {

namespace {

Vec3 refine_range(const BeaconSet& beacons, const Eigen::Matrix<double, 1, 4>& ranges, Vec3 x, int iters) {
  for (int it = 0; it < iters; ++it) {
    Eigen::Matrix<double, 4, 3> jac;
    Vec4 res;
    for (int j = 0; j < 4; ++j) {
      const Vec3 diff = x - beacons.beacon(j);
      const double dist = diff.norm();
      if (!(dist > 0.0)) {
        throw SingularGeometry("trilateration iterate coincides with a beacon");
      }
      res(j) = ranges(j) - dist;
      jac.row(j) = -diff.transpose() / dist;
    }
    const Vec3 step = jac.householderQr().solve(-res);
    x += step;
    if (step.norm() <= 1e-15 * std::max(1.0, x.norm())) break;
  }
  return x;
}

}  // namespace

Mat3 gauss_newton_trilateration(const BeaconSet& beacons, const MeasurementSet& meas, int iters) {
  Eigen::Matrix4d lin;
  lin << beacons.a(), -0.5 * Vec4::Ones();
  const Eigen::FullPivLU<Eigen::Matrix4d> lu(lin);
  if (lu.rank() < 4) {
    throw SingularGeometry("linear trilateration system is rank deficient");
  }

  Mat3 out;
  for (int i = 0; i < 3; ++i) {
    const Vec4 sol = lu.solve(meas.y().col(i));
    out.col(i) = refine_range(beacons, meas.ranges().row(i), sol.head<3>(), iters);
  }
  return out;
}

SolverReport project_to_manifold(const Mat3& target, double side, const SolverConfig& cfg, Rng& rng) {
  const ProjectionCost cost(target);
  return riemannian_steepest_descent(cost, random_point(side, rng), cfg);
}

TrianglePoint improved_init(const BeaconSet& beacons, const MeasurementSet& meas, double side,
                            const SolverConfig& cfg, Rng& rng) {
  return project_to_manifold(gauss_newton_trilateration(beacons, meas), side, cfg, rng).final_point;
}

}  // namespace eqtri
