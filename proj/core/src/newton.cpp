#include "line_search.hpp"

#include <cmath>

namespace eqtri {

Eigen::Matrix<double, 9, 7> tangent_basis(const TrianglePoint& x) {
  Mat9 projected;
  for (int k = 0; k < 9; ++k) {
    Vec9 e = Vec9::Zero();
    e(k) = 1.0;
    projected.col(k) = stack_columns(tangent_project(x, unstack_columns(e)));
  }
  const Eigen::ColPivHouseholderQR<Mat9> qr(projected);
  const Mat9 q = qr.householderQ();
  return q.leftCols<7>();
}

namespace {

TangentVector hessian_apply(const SmoothCost& cost, const TrianglePoint& x,
                            const detail::Evaluation& ev, const TangentVector& xi) {
  return riemannian_hessian(x, ev.egrad, cost.hessian_apply(x.matrix(), xi), xi);
}

struct NewtonStep {
  TangentVector dir;
  bool newton = false;
  double residual = 0.0;
};

NewtonStep newton_direction(const SmoothCost& cost, const TrianglePoint& x, const detail::Evaluation& ev) {
  const Eigen::Matrix<double, 9, 7> basis = tangent_basis(x);
  Eigen::Matrix<double, 7, 7> h;
  for (int k = 0; k < 7; ++k) {
    const TangentVector hk = hessian_apply(cost, x, ev, unstack_columns(basis.col(k)));
    h.col(k) = basis.transpose() * stack_columns(hk);
  }
  h = 0.5 * (h + h.transpose()).eval();
  const Eigen::Matrix<double, 7, 1> rhs = -basis.transpose() * stack_columns(ev.rgrad);

  NewtonStep step;
  const double gnorm = ev.rgrad.norm();
  const Eigen::LLT<Eigen::Matrix<double, 7, 7>> llt(h);
  if (llt.info() == Eigen::Success) {
    const TangentVector xi = unstack_columns(basis * llt.solve(rhs));
    const TangentVector hxi = hessian_apply(cost, x, ev, xi);
    if (xi.allFinite() && inner(xi, hxi) > 0.0 && inner(ev.rgrad, xi) < 0.0) {
      step.dir = xi;
      step.newton = true;
      // The equation lives on T_X M; the rounding-level normal part of the
      // computed gradient (large Euclidean gradient) is not part of it.
      const TangentVector g = tangent_project(x, ev.rgrad);
      step.residual = (hxi + g).norm() / g.norm();
      return step;
    }
  }
  step.dir = -ev.rgrad / gnorm;
  return step;
}

}  // namespace

SolverReport riemannian_newton(const SmoothCost& cost, const TrianglePoint& x0, const SolverConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();

  SolverReport report(x0);
  TrianglePoint x = x0;
  detail::Evaluation ev = detail::evaluate(cost, x);
  report.cost_trace.push_back(ev.f);
  if (cfg.record_iterates) report.iterates.push_back(x.matrix());

  while (true) {
    if (ev.rgrad.norm() <= cfg.grad_tol) {
      report.status = SolverStatus::Converged;
      break;
    }
    if (report.iterations >= cfg.max_iters) {
      report.status = SolverStatus::MaxIters;
      break;
    }

    const NewtonStep step = newton_direction(cost, x, ev);
    // Newton steps are tried at full length first; the fallback is unit norm
    // and starts at one side length like steepest descent.
    const double t_init = step.newton ? 1.0 : x.side();
    if (step.newton) report.newton_residuals.push_back(step.residual);

    detail::SearchOutcome ls = detail::wolfe_search(cost, x, ev, step.dir, t_init, cfg);
    if (ls.result != detail::SearchResult::Accepted) {
      report.status = detail::status_from(ls.result);
      break;
    }

    x = *ls.point;
    ev = std::move(ls.eval);
    ++report.iterations;
    report.cost_trace.push_back(ev.f);
    report.step_trace.push_back(ls.t);
    if (cfg.record_iterates) report.iterates.push_back(x.matrix());

    if (ls.t * step.dir.norm() <= cfg.step_tol) {
      report.status = ev.rgrad.norm() <= cfg.grad_tol ? SolverStatus::Converged : SolverStatus::StepTolerance;
      break;
    }
  }

  report.final_point = x;
  report.final_grad_norm = ev.rgrad.norm();
  report.wall_time = detail::seconds_since(start);
  return report;
}

}  // namespace eqtri
