#pragma once

#include "eqtri/solvers.hpp"

#include <chrono>
#include <optional>

namespace eqtri::detail {

/// Cost, Euclidean gradient and Riemannian gradient evaluated at one point.
struct Evaluation {
  double f = 0.0;
  Mat3 egrad = Mat3::Zero();
  Mat3 rgrad = Mat3::Zero();
};

Evaluation evaluate(const SmoothCost& cost, const TrianglePoint& x);

/// Relative rounding level of f below which Armijo is not trusted.
inline constexpr double kApproxWolfeEps = 1e-10;

enum class SearchResult { Accepted, StepTolerance, Failure, RetractionFailure };

struct SearchOutcome {
  SearchResult result = SearchResult::Failure;
  double t = 0.0;
  std::optional<TrianglePoint> point;
  Evaluation eval;
};

/// Bracketing search for a step t satisfying both weak Wolfe conditions along
/// the retraction curve t -> R_X(t dir):
///   f(R_X(t dir)) <= f(X) + c1 t <grad f(X), dir>
///   d/dt f(R_X(t dir)) >= c2 <grad f(X), dir>
/// Armijo failures shrink the bracket from above, curvature failures raise it
/// from below; at most cfg.max_line_search_steps trial steps. When f(R) is
/// within kApproxWolfeEps |f(X)| of f(X) but fails Armijo, the approximate
/// Wolfe test
///   c2 <grad f(X), dir> <= d/dt f(R_X(t dir)) <= (2 c1 - 1) <grad f(X), dir>
/// decides instead.
SearchOutcome wolfe_search(const SmoothCost& cost, const TrianglePoint& x, const Evaluation& at_x,
                           const TangentVector& dir, double t_init, const SolverConfig& cfg);

SolverStatus status_from(SearchResult r);

/// Stateless wall clock helper.
double seconds_since(const std::chrono::steady_clock::time_point& start);

}  // namespace eqtri::detail
