#include "eqtri/manifold.hpp"
#include "eqtri/objective.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

namespace eqtri {
namespace {

using testing::gaussian_matrix;
using testing::random_placed_point;
using testing::random_tangent;

constexpr double kSide = 0.1;

Mat3 planar_triangle() {
  Mat3 x;
  x.col(0) = Vec3(0.0, 0.0, 0.0);
  x.col(1) = Vec3(0.1, 0.0, 0.0);
  x.col(2) = Vec3(0.05, 0.1 * std::sqrt(3.0) / 2.0, 0.0);
  return x;
}

std::vector<TrianglePoint> sample_points(int n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<TrianglePoint> pts;
  for (int k = 0; k < n; ++k) pts.push_back(random_placed_point(kSide, rng));
  return pts;
}

TEST(ConstraintResidual, RoundedReferenceTripleIsNearlyFeasible) {
  Mat3 x;
  x << 2.0, 2.1, 2.05, 2.0, 2.0, 2.0, 1.0, 1.0, 1.0866;
  const Eigen::Vector2d g = constraint_residual(x, kSide);
  EXPECT_LE(std::abs(g(0)), 1e-15);
  EXPECT_LE(std::abs(g(1)), 5e-7);
}

TEST(ConstraintResidual, CanonicalPlanarTriangle) {
  // The 10-digit apex literal is off by ~7.8e-11; each residual moves by at
  // most |x3 - x1| times that.
  Mat3 x = planar_triangle();
  const double truncation = std::abs(x(1, 2) - 0.0866025403);
  x(1, 2) = 0.0866025403;
  const Eigen::Vector2d g = constraint_residual(x, kSide);
  EXPECT_LE(g.cwiseAbs().maxCoeff(), 2.0 * kSide * truncation);
  EXPECT_LE(constraint_residual(planar_triangle(), kSide).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(ConstraintResidual, ScaledIdentityFrame) {
  const Mat3 x = kSide * std::sqrt(0.5) * Mat3::Identity();
  EXPECT_LE(constraint_residual(x, kSide).cwiseAbs().maxCoeff(), 1e-17);
}

TEST(TrianglePoint, RejectsInfeasibleInput) {
  Mat3 x = planar_triangle();
  x(2, 2) = 0.01;
  EXPECT_THROW(TrianglePoint(x, kSide), NotOnManifold);
  EXPECT_THROW(TrianglePoint(planar_triangle(), -1.0), NotOnManifold);
}

TEST(TrianglePoint, ApexIsFreeSoIsoscelesTrianglesAreMembers) {
  // Both constraints only fix |x2 - x3| = d and |x1 - x2| = |x1 - x3|.
  Mat3 x = planar_triangle();
  x.col(0) = 0.5 * (x.col(1) + x.col(2)) + Vec3(0.0, 0.0, 0.5);
  const TrianglePoint p(x, kSide);
  EXPECT_NEAR((p.column(1) - p.column(2)).norm(), kSide, 1e-15);
  EXPECT_NEAR((p.column(0) - p.column(1)).norm(), (p.column(0) - p.column(2)).norm(), 1e-15);
}

TEST(SolveNormalCoeffs, RecoversNormalCoefficients) {
  for (const TrianglePoint& x : sample_points(20, 3)) {
    const NormalCoeffs a = solve_normal_coeffs(x, x.matrix() * normal_pattern(1.0, 0.0));
    EXPECT_NEAR(a.alpha, 1.0, 1e-10);
    EXPECT_NEAR(a.beta, 0.0, 1e-10);
    const NormalCoeffs b = solve_normal_coeffs(x, x.matrix() * normal_pattern(3.0, -2.0));
    EXPECT_NEAR(b.alpha, 3.0, 1e-9);
    EXPECT_NEAR(b.beta, -2.0, 1e-9);
  }
}

TEST(SolveNormalCoeffs, TangentInputGivesZero) {
  Rng rng(5);
  for (const TrianglePoint& x : sample_points(20, 4)) {
    const NormalCoeffs c = solve_normal_coeffs(x, random_tangent(x, rng));
    EXPECT_LE(std::abs(c.alpha) + std::abs(c.beta), 1e-8);
  }
}

TEST(TangentProject, KillsNormalDirections) {
  for (const TrianglePoint& x : sample_points(20, 6)) {
    const Mat3 n = x.matrix() * normal_pattern(1.0, 0.0);
    EXPECT_LE(tangent_project(x, n).norm(), 1e-12 * n.norm());
  }
}

TEST(TangentProject, IdempotentSelfAdjointAndTangent) {
  Rng rng(7);
  for (const TrianglePoint& x : sample_points(50, 8)) {
    const Mat3 a = gaussian_matrix(rng);
    const Mat3 b = gaussian_matrix(rng);
    const Mat3 pa = tangent_project(x, a);
    EXPECT_LE((tangent_project(x, pa) - pa).norm(), 1e-12 * pa.norm());
    const double lhs = inner(pa, b);
    const double rhs = inner(a, tangent_project(x, b));
    EXPECT_LE(std::abs(lhs - rhs), 1e-12 * a.norm() * b.norm());
    // Substituting into the linearized constraints.
    EXPECT_LE(constraint_derivative(x, pa).cwiseAbs().maxCoeff(), 1e-10 * x.matrix().norm() * pa.norm());
  }
}

TEST(TangentProject, ResidualIsOrthogonalToTangentSpace) {
  Rng rng(9);
  for (const TrianglePoint& x : sample_points(20, 10)) {
    const Mat3 z = gaussian_matrix(rng);
    const Mat3 normal_part = z - tangent_project(x, z);
    EXPECT_LE(std::abs(inner(normal_part, random_tangent(x, rng))), 1e-12 * z.norm());
  }
}

TEST(ConstraintDerivative, ZeroAndTangentInputs) {
  Rng rng(11);
  for (const TrianglePoint& x : sample_points(10, 12)) {
    EXPECT_EQ(constraint_derivative(x, Mat3::Zero()), Eigen::Vector2d::Zero());
    EXPECT_LE(constraint_derivative(x, random_tangent(x, rng)).norm(), 1e-12 * x.matrix().norm());
  }
}

TEST(ConstraintDerivative, MatchesForwardDifferenceWithFirstOrderError) {
  const TrianglePoint x(planar_triangle(), kSide);
  const Mat3 xi = x.matrix() * normal_pattern(1.0, 0.0);
  const Eigen::Vector2d exact = constraint_derivative(x, xi);
  ASSERT_GT(exact.norm(), 0.0);
  double previous = std::numeric_limits<double>::infinity();
  for (const double h : {1e-2, 1e-3, 1e-4, 1e-5}) {
    const Eigen::Vector2d fd =
        (constraint_residual(x.matrix() + h * xi, kSide) - constraint_residual(x.matrix(), kSide)) / h;
    const double err = (fd - exact).norm();
    EXPECT_LE(err, 10.0 * h * xi.squaredNorm());
    EXPECT_LT(err, previous);
    previous = err;
  }
}

TEST(RiemannianGradient, ZeroAndNormalInputs) {
  for (const TrianglePoint& x : sample_points(10, 13)) {
    EXPECT_EQ(riemannian_gradient(x, Mat3::Zero()), Mat3::Zero());
    const Mat3 egrad = x.matrix() * normal_pattern(5.0, 7.0);
    const NormalCoeffs c = solve_normal_coeffs(x, egrad);
    EXPECT_NEAR(c.alpha, 5.0, 1e-8);
    EXPECT_NEAR(c.beta, 7.0, 1e-8);
    EXPECT_LE(riemannian_gradient(x, egrad).norm(), 1e-12 * egrad.norm());
  }
}

TEST(RiemannianGradient, MatchesFiniteDifferenceAlongRetraction) {
  Rng rng(14);
  for (const TrianglePoint& x : sample_points(20, 15)) {
    const ProjectionCost cost(x.matrix() + 0.05 * gaussian_matrix(rng));
    const TangentVector xi = kSide * random_tangent(x, rng);
    const double exact = inner(riemannian_gradient(x, cost.gradient(x.matrix())), xi);
    const auto phi = [&](double t) { return cost.value(retract(x, t * xi).matrix()); };
    EXPECT_LE(testing::best_relative_fd_error(phi, exact), 1e-5);
  }
}

TEST(RiemannianHessian, ConstantCostGivesZero) {
  Rng rng(16);
  for (const TrianglePoint& x : sample_points(5, 17)) {
    EXPECT_EQ(riemannian_hessian(x, Mat3::Zero(), Mat3::Zero(), random_tangent(x, rng)), Mat3::Zero());
  }
}

TEST(RiemannianHessian, SelfAdjointOnTangentSpace) {
  Rng rng(18);
  const BeaconSet beacons = BeaconSet::room_default();
  for (const TrianglePoint& x : sample_points(30, 19)) {
    RangeMatrix r = exact_ranges(beacons, x.matrix());
    for (int k = 0; k < 12; ++k) r(k) += 1e-3 * gaussian_matrix(rng)(0);
    const LocalizationCost cost(beacons, MeasurementSet(beacons, r));
    const Mat3 egrad = cost.gradient(x.matrix());
    const auto hess = [&](const Mat3& v) { return cost.hessian_apply(x.matrix(), v); };
    const TangentVector xi = random_tangent(x, rng);
    const TangentVector zeta = random_tangent(x, rng);
    const double a = inner(riemannian_hessian(x, egrad, hess, xi), zeta);
    const double b = inner(xi, riemannian_hessian(x, egrad, hess, zeta));
    EXPECT_LE(std::abs(a - b), 1e-8 * std::max({std::abs(a), std::abs(b), 1.0}));
  }
}

TEST(RiemannianHessian, MatchesDifferencesOfExtendedGradientField) {
  Rng rng(20);
  const BeaconSet beacons = BeaconSet::room_default();
  for (const TrianglePoint& x : sample_points(20, 21)) {
    RangeMatrix r = exact_ranges(beacons, x.matrix());
    for (int k = 0; k < 12; ++k) r(k) += 1e-2 * gaussian_matrix(rng)(0);
    const LocalizationCost cost(beacons, MeasurementSet(beacons, r));
    const TangentVector xi = random_tangent(x, rng);
    const Mat3 exact = riemannian_hessian(x, cost.gradient(x.matrix()), cost.hessian_apply(x.matrix(), xi), xi);
    EXPECT_LE(testing::hessian_extension_error(x, cost, xi, exact), 1e-8);
  }
}

TEST(RiemannianHessian, DifferencesAlongRetractionConvergeAtSecondOrder) {
  Rng rng(22);
  const BeaconSet beacons = BeaconSet::room_default();
  for (const TrianglePoint& x : sample_points(20, 23)) {
    RangeMatrix r = exact_ranges(beacons, x.matrix());
    for (int k = 0; k < 12; ++k) r(k) += 1e-2 * gaussian_matrix(rng)(0);
    const LocalizationCost cost(beacons, MeasurementSet(beacons, r));
    const TangentVector xi = random_tangent(x, rng);
    const Mat3 exact = riemannian_hessian(x, cost.gradient(x.matrix()), cost.hessian_apply(x.matrix(), xi), xi);

    const auto grad_at = [&](double t) {
      const TrianglePoint y = retract(x, t * xi);
      return Mat3(tangent_project(x, riemannian_gradient(y, cost.gradient(y.matrix()))));
    };
    const auto central = [&](double h) { return Mat3((grad_at(h) - grad_at(-h)) / (2.0 * h)); };
    // Truncation-dominated regime: halving h quarters the error (log-log slope 2).
    const double h = 1e-2 * kSide;
    const double e1 = (central(h) - exact).norm();
    const double e2 = (central(h / 2) - exact).norm();
    const double e3 = (central(h / 4) - exact).norm();
    EXPECT_NEAR(std::log2(e2 / e3), 2.0, 0.2);
    EXPECT_LT(e3, e1);
    const double richardson = ((4.0 * central(h / 4) - central(h / 2)) / 3.0 - exact).norm();
    EXPECT_LE(richardson, 1e-5 * exact.norm());
  }
}

TEST(Retract, ZeroStepIsIdentity) {
  for (const TrianglePoint& x : sample_points(10, 22)) {
    EXPECT_EQ(retract(x, Mat3::Zero()).matrix(), x.matrix());
  }
}

TEST(Retract, OutputsAreFeasible) {
  Rng rng(23);
  for (const TrianglePoint& x : sample_points(100, 24)) {
    const TrianglePoint y = retract(x, 0.01 * kSide * random_tangent(x, rng));
    EXPECT_LE(constraint_residual(y.matrix(), kSide).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Retract, AgreesWithStepToFirstOrder) {
  Rng rng(25);
  for (const TrianglePoint& x : sample_points(20, 26)) {
    const TangentVector xi = kSide * random_tangent(x, rng);
    std::vector<double> logs_h, logs_e;
    for (const double h : {1e-2, 1e-3, 1e-4}) {
      logs_h.push_back(std::log10(h));
      logs_e.push_back(std::log10((retract(x, h * xi).matrix() - x.matrix() - h * xi).norm()));
    }
    const double slope = (logs_e.back() - logs_e.front()) / (logs_h.back() - logs_h.front());
    EXPECT_NEAR(slope, 2.0, 0.1);
  }
}

TEST(RetractionDifferential, MatchesFiniteDifferenceOfRetraction) {
  Rng rng(27);
  for (const TrianglePoint& x : sample_points(20, 28)) {
    const TangentVector eta = 0.3 * kSide * random_tangent(x, rng);
    const TangentVector xi = kSide * random_tangent(x, rng);
    const Mat3 exact = retraction_differential(x, eta, xi);
    const double h = 1e-6;
    const Mat3 fd = (retract(x, eta + h * xi).matrix() - retract(x, eta - h * xi).matrix()) / (2.0 * h);
    EXPECT_LE((fd - exact).norm(), 1e-6 * exact.norm());
    EXPECT_LE((retraction_differential(x, Mat3::Zero(), xi) - xi).norm(), 1e-12 * xi.norm());
  }
}

TEST(VectorTransport, ZeroStepLeavesTangentVectorUnchanged) {
  Rng rng(29);
  for (const TrianglePoint& x : sample_points(10, 30)) {
    const TangentVector xi = random_tangent(x, rng);
    EXPECT_LE((vector_transport(x, Mat3::Zero(), xi) - xi).norm(), 1e-12);
  }
}

TEST(VectorTransport, OutputIsTangentAtNewPointAndKillsNormals) {
  Rng rng(31);
  for (const TrianglePoint& x : sample_points(20, 32)) {
    const TangentVector eta = 0.1 * kSide * random_tangent(x, rng);
    const TangentVector xi = random_tangent(x, rng);
    const TrianglePoint y = retract(x, eta);
    const TangentVector moved = vector_transport(x, eta, xi);
    EXPECT_LE(constraint_derivative(y, moved).norm(), 1e-10 * y.matrix().norm());
    EXPECT_LE(transport_to(y, y.matrix() * normal_pattern(1.0, 0.0)).norm(), 1e-12);
  }
}

TEST(ScaledFrame, IdentityFrame) {
  const TrianglePoint x = scaled_frame(Mat3::Identity(), kSide);
  EXPECT_LE((x.matrix() - 0.0707106781186547524 * Mat3::Identity()).norm(), 1e-16);
  EXPECT_LE(constraint_residual(x.matrix(), kSide).norm(), 1e-17);
}

TEST(RandomPoint, FeasibleAndDeterministic) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng a(seed), b(seed);
    const TrianglePoint p = random_point(kSide, a);
    EXPECT_LE(constraint_residual(p.matrix(), kSide).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_EQ(p.matrix(), random_point(kSide, b).matrix());
  }
}

TEST(RandomOrthonormal, IsOrthonormal) {
  Rng rng(33);
  for (int k = 0; k < 20; ++k) {
    const Mat3 o = random_orthonormal(rng);
    EXPECT_LE((o.transpose() * o - Mat3::Identity()).norm(), 1e-14);
  }
}

}  // namespace
}  // namespace eqtri
