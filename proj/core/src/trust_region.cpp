#include "line_search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace eqtri {

namespace {

struct InnerResult {
  TangentVector eta;
  TangentVector h_eta;
  bool hit_boundary = false;
};

// Largest tau >= 0 with ||eta + tau delta|| = radius.
double boundary_step(const TangentVector& eta, const TangentVector& delta, double radius) {
  const double a = inner(delta, delta);
  const double b = 2.0 * inner(eta, delta);
  const double c = inner(eta, eta) - radius * radius;
  return (-b + std::sqrt(std::max(0.0, b * b - 4.0 * a * c))) / (2.0 * a);
}

// Steihaug-Toint truncated CG on the 7-dimensional tangent space.
InnerResult truncated_cg(const SmoothCost& cost, const TrianglePoint& x, const detail::Evaluation& ev,
                         double radius) {
  const auto hess = [&](const TangentVector& v) {
    return riemannian_hessian(x, ev.egrad, cost.hessian_apply(x.matrix(), v), v);
  };

  InnerResult out{Mat3::Zero(), Mat3::Zero(), false};
  TangentVector r = ev.rgrad;
  TangentVector delta = -r;
  double rr = inner(r, r);
  const double r0 = std::sqrt(rr);
  const double stop = r0 * std::min(r0, 0.1);

  for (int j = 0; j < 7; ++j) {
    const TangentVector h_delta = hess(delta);
    const double curvature = inner(delta, h_delta);
    const double alpha = rr / curvature;
    const TangentVector trial = out.eta + alpha * delta;
    if (curvature <= 0.0 || trial.norm() >= radius) {
      const double tau = boundary_step(out.eta, delta, radius);
      out.eta += tau * delta;
      out.h_eta += tau * h_delta;
      out.hit_boundary = true;
      return out;
    }
    out.eta = trial;
    out.h_eta += alpha * h_delta;
    r = tangent_project(x, r + alpha * h_delta);
    const double rr_next = inner(r, r);
    if (std::sqrt(rr_next) <= stop) break;
    delta = -r + (rr_next / rr) * delta;
    rr = rr_next;
  }
  return out;
}

}  // namespace

SolverReport riemannian_trust_region(const SmoothCost& cost, const TrianglePoint& x0,
                                     const SolverConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();

  const double max_radius = cfg.tr_max_radius > 0.0 ? cfg.tr_max_radius : x0.side();
  double radius = cfg.tr_initial_radius > 0.0 ? cfg.tr_initial_radius : 0.1 * x0.side();
  radius = std::min(radius, max_radius);

  SolverReport report(x0);
  TrianglePoint x = x0;
  detail::Evaluation ev = detail::evaluate(cost, x);
  report.cost_trace.push_back(ev.f);
  if (cfg.record_iterates) report.iterates.push_back(x.matrix());

  constexpr double eps = std::numeric_limits<double>::epsilon();

  while (true) {
    if (ev.rgrad.norm() <= cfg.grad_tol) {
      report.status = SolverStatus::Converged;
      break;
    }
    if (report.iterations >= cfg.max_iters) {
      report.status = SolverStatus::MaxIters;
      break;
    }
    if (radius <= cfg.step_tol) {
      report.status = SolverStatus::StepTolerance;
      break;
    }
    report.radius_trace.push_back(radius);
    ++report.iterations;

    const InnerResult inner_step = truncated_cg(cost, x, ev, radius);
    const double step_norm = inner_step.eta.norm();
    const double model_decrease =
        -inner(ev.rgrad, inner_step.eta) - 0.5 * inner(inner_step.eta, inner_step.h_eta);

    std::optional<TrianglePoint> candidate;
    detail::Evaluation cand_ev;
    double rho = -std::numeric_limits<double>::infinity();
    try {
      candidate.emplace(retract(x, inner_step.eta));
      cand_ev.f = cost.value(candidate->matrix());
      // Guards the ratio against cancellation once both decreases reach rounding level.
      const double reg = eps * std::max(1.0, std::abs(ev.f)) * 1e3;
      rho = (ev.f - cand_ev.f + reg) / (model_decrease + reg);
    } catch (const RetractionDomain&) {
      candidate.reset();
    }

    if (rho < 0.25) {
      radius /= 4.0;
    } else if (rho > 0.75 && inner_step.hit_boundary) {
      radius = std::min(2.0 * radius, max_radius);
    }

    if (candidate && rho > cfg.tr_accept_ratio) {
      cand_ev.egrad = cost.gradient(candidate->matrix());
      cand_ev.rgrad = riemannian_gradient(*candidate, cand_ev.egrad);
      x = *candidate;
      ev = std::move(cand_ev);
      report.cost_trace.push_back(ev.f);
      report.step_trace.push_back(step_norm);
      if (cfg.record_iterates) report.iterates.push_back(x.matrix());
      if (step_norm <= cfg.step_tol) {
        report.status = ev.rgrad.norm() <= cfg.grad_tol ? SolverStatus::Converged : SolverStatus::StepTolerance;
        break;
      }
    }
  }

  report.final_point = x;
  report.final_grad_norm = ev.rgrad.norm();
  report.wall_time = detail::seconds_since(start);
  return report;
}

}  // namespace eqtri
