#pragma once

#include "eqtri/manifold.hpp"
#include "eqtri/objective.hpp"

#include <optional>
#include <string_view>
#include <utility>
#include <vector>

namespace eqtri {

struct SolverConfig {
  int max_iters = 1000;
  double grad_tol = 1e-10;
  double step_tol = 1e-16;
  double wolfe_c1 = 1e-4;
  double wolfe_c2 = 0.9;
  double backtrack_factor = 0.5;
  int max_line_search_steps = 50;
  /// Non-positive radii mean "derive from the side length": 0.1 d and d.
  double tr_initial_radius = 0.0;
  double tr_max_radius = 0.0;
  double tr_accept_ratio = 0.1;
  /// Keep every iterate in SolverReport::iterates.
  bool record_iterates = false;

  /// Throws std::invalid_argument unless 0 < c1 < c2 < 1, tolerances are
  /// positive, and max_iters >= 1.
  void validate() const;
};

enum class SolverStatus {
  Converged,          // Riemannian gradient norm <= grad_tol
  MaxIters,
  StepTolerance,      // accepted step or trial step fell below step_tol
  LineSearchFailure,
  RetractionFailure,
};

std::string_view to_string(SolverStatus status);

struct SolverReport {
  explicit SolverReport(TrianglePoint start) : final_point(std::move(start)) {}

  TrianglePoint final_point;
  int iterations = 0;
  double final_grad_norm = 0.0;
  std::vector<double> cost_trace;
  /// Accepted step sizes t (line-search solvers) or step norms (trust region).
  std::vector<double> step_trace;
  /// Trust-region radius at the start of every outer iteration.
  std::vector<double> radius_trace;
  /// ||Hess[xi] + Pi(grad)|| / ||Pi(grad)|| for every Newton solve.
  std::vector<double> newton_residuals;
  std::vector<Mat3> iterates;
  double wall_time = 0.0;
  SolverStatus status = SolverStatus::MaxIters;

  bool converged() const { return status == SolverStatus::Converged; }
};

/// Riemannian steepest descent with normalized direction -grad/||grad|| and a
/// weak-Wolfe bracketing line search along the retraction curve.
SolverReport riemannian_steepest_descent(const SmoothCost& cost, const TrianglePoint& x0,
                                         const SolverConfig& cfg = {});

/// Riemannian Newton: dense solve of the Newton equation in an orthonormal
/// basis of the tangent space, steepest-descent fallback when the model is not
/// positive definite along the candidate.
SolverReport riemannian_newton(const SmoothCost& cost, const TrianglePoint& x0,
                               const SolverConfig& cfg = {});

/// Riemannian trust region with a truncated-CG (Steihaug-Toint) inner solver.
SolverReport riemannian_trust_region(const SmoothCost& cost, const TrianglePoint& x0,
                                     const SolverConfig& cfg = {});

/// Orthonormal basis (under the trace metric) of T_X M, as 7 stacked-column
/// vectors of length 9.
Eigen::Matrix<double, 9, 7> tangent_basis(const TrianglePoint& x);

/// Unconstrained per-transmitter trilateration: linear solve of
/// [A, -1/2] (x, s) = y_i followed by Gauss-Newton on r_ij - ||x_i - b_j||.
/// The result is generally not on the manifold.
Mat3 gauss_newton_trilateration(const BeaconSet& beacons, const MeasurementSet& meas, int iters = 20);

/// Minimizes ||X - target||^2 over M with steepest descent from a random point.
SolverReport project_to_manifold(const Mat3& target, double side, const SolverConfig& cfg, Rng& rng);

/// Gauss-Newton trilateration followed by projection onto the manifold.
TrianglePoint improved_init(const BeaconSet& beacons, const MeasurementSet& meas, double side,
                            const SolverConfig& cfg, Rng& rng);

}  // namespace eqtri
