#include "eqtri/manifold.hpp"

#include <cmath>
#include <string>

namespace eqtri {

namespace {

constexpr double kGramDetTol = 1e-14;
constexpr double kRetractionPoleTol = 1e-14;

const Mat3& unit_alpha() {
  static const Mat3 u = normal_pattern(1.0, 0.0);
  return u;
}

const Mat3& unit_beta() {
  static const Mat3 u = normal_pattern(0.0, 1.0);
  return u;
}

Eigen::Vector2d solve_gram(const Eigen::Matrix2d& s, const Eigen::Vector2d& rhs) {
  const double det = s(0, 0) * s(1, 1) - s(0, 1) * s(1, 0);
  const double tr = s(0, 0) + s(1, 1);
  if (!(det >= kGramDetTol * tr * tr)) {
    throw NearSingularGram("normal-space Gram matrix is numerically singular (det=" +
                           std::to_string(det) + ")");
  }
  return {(s(1, 1) * rhs(0) - s(0, 1) * rhs(1)) / det, (s(0, 0) * rhs(1) - s(1, 0) * rhs(0)) / det};
}

}  // namespace

Eigen::Vector2d constraint_residual(const Mat3& x, double side) {
  const Vec3 x1 = x.col(0);
  const Vec3 x2 = x.col(1);
  const Vec3 x3 = x.col(2);
  const double h = half_side_squared(side);
  return {(x1 - x2).dot(x2 - x3) + h, (x1 - x3).dot(x2 - x3) - h};
}

TrianglePoint::TrianglePoint(const Mat3& x, double side) : x_(x), side_(side) {
  if (!(side > 0.0) || !std::isfinite(side)) {
    throw NotOnManifold("side length must be positive and finite");
  }
  if (!x.allFinite()) {
    throw NotOnManifold("point has non-finite entries");
  }
  const Eigen::Vector2d g = constraint_residual(x, side);
  const double tol = kFeasibilityTol * side * side;
  if (std::abs(g(0)) > tol || std::abs(g(1)) > tol) {
    throw NotOnManifold("constraint residual (" + std::to_string(g(0)) + ", " +
                        std::to_string(g(1)) + ") exceeds tolerance");
  }
  const double scale = x.norm();
  if ((x.col(1) + x.col(2)).norm() <= 1e-14 * scale) {
    throw NotOnManifold("x2 = -x3 is outside the retraction domain");
  }
}

Mat3 normal_pattern(double alpha, double beta) {
  Mat3 u;
  u << 0.0, alpha + beta, -alpha - beta,
       alpha + beta, -2.0 * alpha, alpha - beta,
       -alpha - beta, alpha - beta, 2.0 * beta;
  return u;
}

GramSystem gram_system(const Mat3& x) {
  const Mat3 na = x * unit_alpha();
  const Mat3 nb = x * unit_beta();
  GramSystem g;
  g.s(0, 0) = inner(na, na);
  g.s(0, 1) = inner(nb, na);
  g.s(1, 0) = g.s(0, 1);
  g.s(1, 1) = inner(nb, nb);
  return g;
}

NormalCoeffs solve_normal_coeffs(const TrianglePoint& x, const Mat3& z) {
  const Mat3& xm = x.matrix();
  const Eigen::Vector2d rhs(inner(z, xm * unit_alpha()), inner(z, xm * unit_beta()));
  const Eigen::Vector2d ab = solve_gram(gram_system(xm).s, rhs);
  return {ab(0), ab(1)};
}

TangentVector tangent_project(const TrianglePoint& x, const Mat3& z) {
  return z - x.matrix() * normal_pattern(solve_normal_coeffs(x, z));
}

Eigen::Vector2d constraint_derivative(const TrianglePoint& x, const Mat3& xi) {
  const Mat3& xm = x.matrix();
  const Vec3 x1 = xm.col(0), x2 = xm.col(1), x3 = xm.col(2);
  const Vec3 e1 = xi.col(0), e2 = xi.col(1), e3 = xi.col(2);
  return {(e1 - e2).dot(x2 - x3) + (x1 - x2).dot(e2 - e3),
          (e1 - e3).dot(x2 - x3) + (x1 - x3).dot(e2 - e3)};
}

TangentVector riemannian_gradient(const TrianglePoint& x, const Mat3& egrad) {
  return tangent_project(x, egrad);
}

TangentVector riemannian_hessian(const TrianglePoint& x, const Mat3& egrad,
                                 const Mat3& ehess_xi, const TangentVector& xi) {
  const Mat3& xm = x.matrix();
  const Mat3 xa = xm * unit_alpha();
  const Mat3 xb = xm * unit_beta();
  const Mat3 ea = xi * unit_alpha();
  const Mat3 eb = xi * unit_beta();

  const Eigen::Matrix2d s = gram_system(xm).s;
  const Eigen::Vector2d ab = solve_gram(s, Eigen::Vector2d(inner(egrad, xa), inner(egrad, xb)));

  // Directional derivative of S along xi.
  Eigen::Matrix2d s_dot;
  s_dot(0, 0) = 2.0 * inner(ea, xa);
  s_dot(0, 1) = inner(eb, xa) + inner(xb, ea);
  s_dot(1, 0) = inner(ea, xb) + inner(xa, eb);
  s_dot(1, 1) = 2.0 * inner(eb, xb);

  const Eigen::Vector2d rhs_dot(inner(ehess_xi, xa) + inner(egrad, ea),
                                inner(ehess_xi, xb) + inner(egrad, eb));
  const Eigen::Vector2d ab_dot = solve_gram(s, rhs_dot - s_dot * ab);

  const Mat3 d_grad = ehess_xi - xi * normal_pattern(ab(0), ab(1)) -
                      xm * normal_pattern(ab_dot(0), ab_dot(1));
  return tangent_project(x, d_grad);
}

RetractionScalars retraction_scalars(const Mat3& z) {
  const Vec3 z1 = z.col(0), z2 = z.col(1), z3 = z.col(2);
  const double scale2 = z.squaredNorm();
  if (!z.allFinite()) {
    throw RetractionDomain("retraction argument is not finite");
  }
  const Vec3 w = z2 - z3;
  if (w.norm() <= 1e-14 * std::sqrt(scale2) || (z2 + z3).norm() <= 1e-14 * std::sqrt(scale2)) {
    throw RetractionDomain("z2 = +-z3");
  }

  RetractionScalars r;
  if (z1.isZero(0.0)) {
    r.gamma = 1.0;
  } else {
    const double denom = 2.0 * (z1(0) * w(0) + z1(1) * w(1));
    if (std::abs(denom) <= kRetractionPoleTol * scale2) {
      throw RetractionDomain("gamma denominator vanishes");
    }
    r.gamma = ((z2 + z3).dot(w) - 2.0 * z1.dot(w)) / denom + 1.0;
  }
  const Vec3 u1(r.gamma * z1(0), r.gamma * z1(1), z1(2));
  r.lambda = (u1 - z3).dot(w);
  if (!(r.lambda > 0.0) || !std::isfinite(r.lambda)) {
    throw RetractionDomain("non-positive retraction scale argument");
  }
  return r;
}

TrianglePoint retract(const TrianglePoint& x, const TangentVector& xi) {
  if (xi.isZero(0.0)) return x;
  const double side = x.side();
  const Mat3 z = x.matrix() + xi;
  const RetractionScalars r = retraction_scalars(z);

  Mat3 u = z;
  u(0, 0) *= r.gamma;
  u(1, 0) *= r.gamma;
  const Mat3 out = std::sqrt(half_side_squared(side) / r.lambda) * u;

  const Eigen::Vector2d g = constraint_residual(out, side);
  const double tol = kFeasibilityTol * side * side;
  if (!out.allFinite() || std::abs(g(0)) > tol || std::abs(g(1)) > tol) {
    throw RetractionDomain("retraction lost feasibility (ill-conditioned gamma)");
  }
  try {
    return TrianglePoint(out, side);
  } catch (const NotOnManifold& e) {
    throw RetractionDomain(e.what());
  }
}

TangentVector retraction_differential(const TrianglePoint& x, const TangentVector& eta,
                                      const TangentVector& xi) {
  const double side = x.side();
  const Mat3 z = x.matrix() + eta;
  const RetractionScalars r = retraction_scalars(z);

  const Vec3 z1 = z.col(0), z2 = z.col(1), z3 = z.col(2);
  const Vec3 v1 = xi.col(0), v2 = xi.col(1), v3 = xi.col(2);
  const Vec3 w = z2 - z3;
  const Vec3 w_dot = v2 - v3;

  double gamma_dot = 0.0;
  if (!z1.isZero(0.0)) {
    const double num = (z2 + z3).dot(w) - 2.0 * z1.dot(w);
    const double den = 2.0 * (z1(0) * w(0) + z1(1) * w(1));
    const double num_dot = (v2 + v3).dot(w) + (z2 + z3).dot(w_dot) - 2.0 * v1.dot(w) - 2.0 * z1.dot(w_dot);
    const double den_dot = 2.0 * (v1(0) * w(0) + v1(1) * w(1) + z1(0) * w_dot(0) + z1(1) * w_dot(1));
    gamma_dot = (num_dot * den - num * den_dot) / (den * den);
  }

  const Vec3 u1(r.gamma * z1(0), r.gamma * z1(1), z1(2));
  const Vec3 u1_dot(gamma_dot * z1(0) + r.gamma * v1(0), gamma_dot * z1(1) + r.gamma * v1(1), v1(2));
  const double lambda_dot = (u1_dot - v3).dot(w) + (u1 - z3).dot(w_dot);

  const double scale = std::sqrt(half_side_squared(side) / r.lambda);
  const double scale_dot = -0.5 * scale * lambda_dot / r.lambda;

  Mat3 u = z;
  u.col(0) = u1;
  Mat3 u_dot = xi;
  u_dot.col(0) = u1_dot;
  return scale_dot * u + scale * u_dot;
}

TangentVector vector_transport(const TrianglePoint& x, const TangentVector& eta,
                               const TangentVector& xi) {
  return tangent_project(retract(x, eta), xi);
}

TrianglePoint scaled_frame(const Mat3& orthonormal, double side) {
  return TrianglePoint(side * std::sqrt(0.5) * orthonormal, side);
}

Mat3 random_orthonormal(Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Mat3 g;
  for (int j = 0; j < 3; ++j) {
    for (int i = 0; i < 3; ++i) {
      g(i, j) = normal(rng);
    }
  }
  const Eigen::HouseholderQR<Mat3> qr(g);
  Mat3 q = qr.householderQ();
  const Mat3 r = qr.matrixQR();
  for (int k = 0; k < 3; ++k) {
    if (r(k, k) < 0.0) {
      q.col(k) = -q.col(k);
    }
  }
  return q;
}

TrianglePoint random_point(double side, Rng& rng) {
  return scaled_frame(random_orthonormal(rng), side);
}

}  // namespace eqtri
