#include "line_search.hpp"

namespace eqtri {

SolverReport riemannian_steepest_descent(const SmoothCost& cost, const TrianglePoint& x0,
                                         const SolverConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();

  SolverReport report(x0);
  TrianglePoint x = x0;
  detail::Evaluation ev = detail::evaluate(cost, x);
  report.cost_trace.push_back(ev.f);
  if (cfg.record_iterates) report.iterates.push_back(x.matrix());

  // First trial step is one side length; afterwards grow from the last accepted step.
  double t_init = x.side();
  report.status = SolverStatus::MaxIters;

  while (true) {
    const double gnorm = ev.rgrad.norm();
    if (gnorm <= cfg.grad_tol) {
      report.status = SolverStatus::Converged;
      break;
    }
    if (report.iterations >= cfg.max_iters) {
      report.status = SolverStatus::MaxIters;
      break;
    }

    const TangentVector dir = -ev.rgrad / gnorm;
    detail::SearchOutcome step = detail::wolfe_search(cost, x, ev, dir, t_init, cfg);
    if (step.result != detail::SearchResult::Accepted) {
      report.status = detail::status_from(step.result);
      break;
    }

    x = *step.point;
    ev = std::move(step.eval);
    ++report.iterations;
    report.cost_trace.push_back(ev.f);
    report.step_trace.push_back(step.t);
    if (cfg.record_iterates) report.iterates.push_back(x.matrix());

    if (step.t <= cfg.step_tol) {
      report.status = ev.rgrad.norm() <= cfg.grad_tol ? SolverStatus::Converged : SolverStatus::StepTolerance;
      break;
    }
    t_init = step.t / cfg.backtrack_factor;
  }

  report.final_point = x;
  report.final_grad_norm = ev.rgrad.norm();
  report.wall_time = detail::seconds_since(start);
  return report;
}

}  // namespace eqtri
