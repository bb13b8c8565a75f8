#pragma once

// Fisher information of the Zadoff-Chu ranging model and the unconstrained /
// constrained Cramer-Rao bounds on theta = [x1; x2; x3].

#include "eqtri/manifold.hpp"
#include "eqtri/objective.hpp"
#include "eqtri/signal.hpp"

#include <array>

namespace eqtri {

using Mat3x9 = Eigen::Matrix<double, 3, 9>;
using Mat9x6 = Eigen::Matrix<double, 9, 6>;

/// Scalar weight w_ij of the rank-one term w (x_i - b_j)(x_i - b_j)^T, using the
/// odd- or even-length closed form according to the parity of K.
double link_information(double range_m, int transmitter, int beacon, const SignalParams& sig);

/// Per-transmitter information blocks sum_j w_ij (x_i - b_j)(x_i - b_j)^T.
/// Throws DegenerateGeometry when a transmitter sits on a beacon.
std::array<Mat3, 3> fim_blocks(const Mat3& x, const BeaconSet& beacons, const SignalParams& sig);

/// block-diag of the three information blocks.
Mat9 assemble_fim(const std::array<Mat3, 3>& blocks);

/// J^{-1}; SingularFim when cond(J) > 1e12.
Mat9 crb(const Mat9& j);

/// (||x1-x2||^2 - d^2, ||x2-x3||^2 - d^2, ||x3-x1||^2 - d^2).
Vec3 side_constraints(const Mat3& x, double side);

/// Jacobian of side_constraints with respect to theta.
Mat3x9 constraint_jacobian(const Mat3& x);

/// Orthonormal null basis of Q from a column-pivoted QR of Q^T.
/// RankDeficient when rank(Q) < 3.
Mat9x6 nullspace_basis(const Mat3x9& q);

/// Six null vectors of Q written out in closed form from its entries. Columns
/// are neither normalized nor mutually orthogonal.
Mat9x6 explicit_null_vectors(const Mat3x9& q);

/// Psi (Psi^T J Psi)^{-1} Psi^T; SingularProjectedFim when cond > 1e12.
Mat9 ccrb(const Mat9& j, const Mat9x6& psi);

struct FisherBundle {
  Vec9 theta;
  Mat9 j;
  Mat9 crb;
  Mat3x9 q;
  Mat9x6 psi;
  Mat9 ccrb;
};

FisherBundle fisher_bundle(const Mat3& x, const BeaconSet& beacons, const SignalParams& sig);

}  // namespace eqtri
