#include "line_search.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace eqtri {

void SolverConfig::validate() const {
  if (!(wolfe_c1 > 0.0 && wolfe_c1 < wolfe_c2 && wolfe_c2 < 1.0)) {
    throw std::invalid_argument("Wolfe constants must satisfy 0 < c1 < c2 < 1");
  }
  if (!(grad_tol > 0.0) || !(step_tol > 0.0)) {
    throw std::invalid_argument("tolerances must be positive");
  }
  if (max_iters < 1 || max_line_search_steps < 1) {
    throw std::invalid_argument("iteration limits must be at least 1");
  }
  if (!(backtrack_factor > 0.0 && backtrack_factor < 1.0)) {
    throw std::invalid_argument("backtrack factor must lie in (0, 1)");
  }
  if (!(tr_accept_ratio >= 0.0 && tr_accept_ratio < 0.25)) {
    throw std::invalid_argument("trust-region accept ratio must lie in [0, 0.25)");
  }
}

std::string_view to_string(SolverStatus status) {
  switch (status) {
    case SolverStatus::Converged: return "converged";
    case SolverStatus::MaxIters: return "max_iters";
    case SolverStatus::StepTolerance: return "step_tolerance";
    case SolverStatus::LineSearchFailure: return "line_search_failure";
    case SolverStatus::RetractionFailure: return "retraction_failure";
  }
  return "unknown";
}

namespace detail {

Evaluation evaluate(const SmoothCost& cost, const TrianglePoint& x) {
  Evaluation e;
  e.f = cost.value(x.matrix());
  e.egrad = cost.gradient(x.matrix());
  e.rgrad = riemannian_gradient(x, e.egrad);
  return e;
}

SearchOutcome wolfe_search(const SmoothCost& cost, const TrianglePoint& x, const Evaluation& at_x,
                           const TangentVector& dir, double t_init, const SolverConfig& cfg) {
  const double slope = inner(at_x.rgrad, dir);
  const double dir_norm = dir.norm();
  const double grow = 1.0 / cfg.backtrack_factor;

  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();
  double t = t_init;
  bool last_was_retraction = false;

  for (int k = 0; k < cfg.max_line_search_steps; ++k) {
    if (t * dir_norm <= cfg.step_tol) {
      SearchOutcome out;
      out.result = last_was_retraction ? SearchResult::RetractionFailure : SearchResult::StepTolerance;
      return out;
    }

    std::optional<TrianglePoint> y;
    try {
      y.emplace(retract(x, t * dir));
      last_was_retraction = false;
    } catch (const RetractionDomain&) {
      last_was_retraction = true;
    }

    if (y) {
      const double fy = cost.value(y->matrix());
      const bool armijo = fy <= at_x.f + cfg.wolfe_c1 * t * slope;
      // Near a minimizer the predicted decrease drops below the rounding
      // error of f; then fall back to the approximate Wolfe test, which
      // only trusts the slope (Hager and Zhang).
      const bool approx = !armijo && fy <= at_x.f + kApproxWolfeEps * std::abs(at_x.f);
      if (!armijo && !approx) {
        hi = t;
      } else {
        Evaluation ey;
        ey.f = fy;
        ey.egrad = cost.gradient(y->matrix());
        ey.rgrad = riemannian_gradient(*y, ey.egrad);
        const double new_slope = inner(ey.egrad, retraction_differential(x, t * dir, dir));
        if (approx && new_slope > (2.0 * cfg.wolfe_c1 - 1.0) * slope) {
          hi = t;
        } else if (new_slope < cfg.wolfe_c2 * slope) {
          lo = t;
        } else {
          SearchOutcome out;
          out.result = SearchResult::Accepted;
          out.t = t;
          out.point = std::move(y);
          out.eval = std::move(ey);
          return out;
        }
      }
    } else {
      hi = t;
    }

    if (std::isinf(hi)) {
      t = grow * lo;
    } else if (lo > 0.0) {
      t = 0.5 * (lo + hi);
    } else {
      t = cfg.backtrack_factor * hi;
    }
  }

  SearchOutcome out;
  out.result = last_was_retraction ? SearchResult::RetractionFailure : SearchResult::Failure;
  return out;
}

SolverStatus status_from(SearchResult r) {
  switch (r) {
    case SearchResult::StepTolerance: return SolverStatus::StepTolerance;
    case SearchResult::RetractionFailure: return SolverStatus::RetractionFailure;
    case SearchResult::Failure: return SolverStatus::LineSearchFailure;
    case SearchResult::Accepted: break;
  }
  return SolverStatus::MaxIters;
}

double seconds_since(const std::chrono::steady_clock::time_point& start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace detail
}  // namespace eqtri
