#pragma once

// Geometry of the equilateral-triangle manifold
//
//   M = { X = [x1, x2, x3] in R^{3x3} :
//           (x1 - x2)^T (x2 - x3) = -d^2 cos(pi/3),
//           (x1 - x3)^T (x2 - x3) =  d^2 cos(pi/3) }
//
// embedded in R^{3x3} with the trace metric <A, B> = Tr(A^T B). Columns hold
// the transmitter positions. The normal space at X is spanned by X U(1,0) and
// X U(0,1), where U(alpha, beta) is the symmetric pattern built by
// normal_pattern().

#include "eqtri/errors.hpp"
#include "eqtri/types.hpp"

#include <concepts>
#include <type_traits>

namespace eqtri {

/// Membership tolerance, relative to d^2.
inline constexpr double kFeasibilityTol = 1e-9;

/// d^2 cos(pi/3).
inline double half_side_squared(double side) { return 0.5 * side * side; }

/// g(X) = ((x1-x2).(x2-x3) + d^2/2, (x1-x3).(x2-x3) - d^2/2). Zero iff X is on M.
Eigen::Vector2d constraint_residual(const Mat3& x, double side);

/// A validated point of M. Construction throws NotOnManifold when either
/// residual exceeds kFeasibilityTol * d^2 or when x2 = +-x3.
class TrianglePoint {
 public:
  TrianglePoint(const Mat3& x, double side);

  const Mat3& matrix() const { return x_; }
  double side() const { return side_; }
  Vec3 column(int i) const { return x_.col(i); }

 private:
  Mat3 x_;
  double side_;
};

/// Coefficients of the normal-space element X U(alpha, beta).
struct NormalCoeffs {
  double alpha = 0.0;
  double beta = 0.0;
};

/// U(alpha, beta) =
///   [  0          alpha+beta   -alpha-beta ]
///   [  alpha+beta -2 alpha      alpha-beta ]
///   [ -alpha-beta  alpha-beta   2 beta     ]
Mat3 normal_pattern(double alpha, double beta);
inline Mat3 normal_pattern(const NormalCoeffs& c) { return normal_pattern(c.alpha, c.beta); }

/// Gram matrix S of the two normal generators X U(1,0), X U(0,1).
struct GramSystem {
  Eigen::Matrix2d s;
};

GramSystem gram_system(const Mat3& x);

/// Solves S (alpha, beta)^T = (<Z, X U(1,0)>, <Z, X U(0,1)>)^T in closed form.
/// Throws NearSingularGram when det(S) < 1e-14 trace(S)^2.
NormalCoeffs solve_normal_coeffs(const TrianglePoint& x, const Mat3& z);

/// Orthogonal projection onto T_X M: Z - X U(alpha, beta).
TangentVector tangent_project(const TrianglePoint& x, const Mat3& z);

/// D g(X)[xi]; linear in xi, zero exactly on the tangent space.
Eigen::Vector2d constraint_derivative(const TrianglePoint& x, const Mat3& xi);

/// Riemannian gradient from the Euclidean one.
TangentVector riemannian_gradient(const TrianglePoint& x, const Mat3& egrad);

/// Riemannian Hessian applied to a tangent vector, given the Euclidean gradient
/// at X and the Euclidean Hessian already applied to xi.
TangentVector riemannian_hessian(const TrianglePoint& x, const Mat3& egrad,
                                 const Mat3& ehess_xi, const TangentVector& xi);

// Eigen matrices are themselves "invocable" through indexed views; exclude them.
template <class HessApply>
  requires(std::invocable<HessApply, const Mat3&> &&
           !std::is_base_of_v<Eigen::EigenBase<std::decay_t<HessApply>>, std::decay_t<HessApply>>)
TangentVector riemannian_hessian(const TrianglePoint& x, const Mat3& egrad,
                                 HessApply&& ehess_apply, const TangentVector& xi) {
  return riemannian_hessian(x, egrad, Mat3(ehess_apply(xi)), xi);
}

/// Retraction R_X(xi) built from Z = X + xi by rescaling the xy-components of
/// z1 with gamma and then scaling the whole triangle back onto M. Throws
/// RetractionDomain when Z leaves the domain (z2 = +-z3, vanishing gamma
/// denominator, non-positive scale argument).
TrianglePoint retract(const TrianglePoint& x, const TangentVector& xi);

/// Scalars of the retraction, exposed for tests and diagnostics.
struct RetractionScalars {
  double gamma = 1.0;
  double lambda = 0.0;
};
RetractionScalars retraction_scalars(const Mat3& z);

/// Differential of eta -> R_X(eta) at eta applied to xi, i.e. d/dt R_X(eta + t xi)
/// at t = 0. Tangent at R_X(eta); equals xi when eta = 0.
TangentVector retraction_differential(const TrianglePoint& x, const TangentVector& eta,
                                      const TangentVector& xi);

/// T_eta(xi) = Pi_{R_X(eta)}(xi).
TangentVector vector_transport(const TrianglePoint& x, const TangentVector& eta,
                               const TangentVector& xi);

/// Projection of xi onto the tangent space at an already-retracted point.
inline TangentVector transport_to(const TrianglePoint& target, const TangentVector& xi) {
  return tangent_project(target, xi);
}

/// X = d sqrt(cos(pi/3)) O for an orthonormal O; always on M.
TrianglePoint scaled_frame(const Mat3& orthonormal, double side);

/// Haar-uniform random orthonormal 3x3 matrix (QR of a Gaussian matrix with
/// the diagonal sign fix).
Mat3 random_orthonormal(Rng& rng);

TrianglePoint random_point(double side, Rng& rng);

}  // namespace eqtri
