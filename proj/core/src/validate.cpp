#include "eqtri/validate.hpp"

#include "eqtri/manifold.hpp"
#include "eqtri/objective.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>

namespace eqtri {

namespace {

constexpr double kTiny = std::numeric_limits<double>::min();

Mat3 gaussian(Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Mat3 m;
  for (int j = 0; j < 3; ++j)
    for (int i = 0; i < 3; ++i) m(i, j) = normal(rng);
  return m;
}

TrianglePoint placed_point(double side, Rng& rng) {
  std::uniform_real_distribution<double> pos(0.5, 3.0);
  const TrianglePoint base = random_point(side, rng);
  const Vec3 shift(pos(rng), pos(rng), pos(rng));
  // Side constraints only involve column differences, so a common shift stays on M.
  return TrianglePoint(base.matrix().colwise() + shift, side);
}

LocalizationCost noisy_cost(const Mat3& near, Rng& rng) {
  std::normal_distribution<double> noise(0.0, 1e-3);
  const BeaconSet beacons = BeaconSet::room_default();
  RangeMatrix r = exact_ranges(beacons, near);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 4; ++j) r(i, j) += noise(rng);
  return LocalizationCost(beacons, MeasurementSet(beacons, r));
}

// Projection onto the complement of span{Y U(1,0), Y U(0,1)} for any ambient
// Y; a smooth extension of the tangent projection off M.
Mat3 ambient_projection(const Mat3& y, const Mat3& z) {
  const Mat3 n1 = y * normal_pattern(1.0, 0.0);
  const Mat3 n2 = y * normal_pattern(0.0, 1.0);
  Eigen::Matrix2d gram;
  gram << inner(n1, n1), inner(n1, n2), inner(n2, n1), inner(n2, n2);
  const Eigen::Vector2d c = gram.ldlt().solve(Eigen::Vector2d(inner(z, n1), inner(z, n2)));
  return z - c(0) * n1 - c(1) * n2;
}

double log_slope(const std::vector<double>& h, const std::vector<double>& e) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(h.size());
  for (std::size_t k = 0; k < h.size(); ++k) {
    const double x = std::log10(h[k]);
    const double y = std::log10(std::max(e[k], kTiny));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

struct Tracker {
  CheckResult r;
  bool lower_is_better = true;

  Tracker(std::string name, double tol) {
    r.name = std::move(name);
    r.tolerance = tol;
    r.passed = true;
  }

  void record(double value) {
    if (!std::isfinite(value)) {
      r.worst = value;
      r.passed = false;
      return;
    }
    r.worst = std::max(r.worst, value);
    if (!(value <= r.tolerance)) r.passed = false;
  }
};

}  // namespace

std::vector<CheckResult> run_geometry_suite(const ValidationOptions& opts) {
  Rng rng(opts.seed);
  const double d = opts.side;

  const std::function<Mat3(const TrianglePoint&, const Mat3&)> project =
      opts.flip_projection_sign
          ? std::function<Mat3(const TrianglePoint&, const Mat3&)>(
                [](const TrianglePoint& x, const Mat3& z) { return Mat3(2.0 * z - tangent_project(x, z)); })
          : std::function<Mat3(const TrianglePoint&, const Mat3&)>(
                [](const TrianglePoint& x, const Mat3& z) { return tangent_project(x, z); });

  Tracker idempotent("projection idempotent", 1e-12);
  Tracker self_adjoint("projection self-adjoint", 1e-12);
  Tracker tangent("projected vectors tangent", 1e-10);
  Tracker grad_normal("gradient orthogonal to normals", 1e-12);
  Tracker retract_zero("retraction at zero is identity", 1e-14);
  Tracker retract_feasible("retraction feasible (|g| for |xi| = 0.01 d)", 1e-12);
  Tracker retract_order("retraction second-order defect (|slope - 2|)", 0.1);
  Tracker grad_fd("gradient vs finite differences", 1e-5);
  Tracker hess_fd("Hessian vs finite differences", 1e-8);
  Tracker hess_retraction_fd("Hessian vs differences along retraction", 1e-5);
  Tracker hess_sym("Hessian self-adjoint", 1e-8);
  Tracker cost_grad_fd("cost gradient vs finite differences", 1e-6);
  Tracker cost_hess_fd("cost Hessian-vector vs finite differences", 1e-5);

  for (int p = 0; p < opts.points; ++p) {
    const TrianglePoint x = placed_point(d, rng);
    const Mat3& xm = x.matrix();

    // Projection.
    const Mat3 y = gaussian(rng);
    const Mat3 z = gaussian(rng);
    const Mat3 pz = project(x, z);
    idempotent.record((project(x, pz) - pz).norm() / std::max(pz.norm(), kTiny));
    self_adjoint.record(std::abs(inner(project(x, y), z) - inner(y, pz)) / (y.norm() * z.norm()));
    tangent.record(constraint_derivative(x, pz).norm() / (xm.norm() * z.norm()));

    const LocalizationCost cost = noisy_cost(xm, rng);
    const Mat3 egrad = cost.gradient(xm);
    const Mat3 rgrad = project(x, egrad);
    const Mat3 na = xm * normal_pattern(1.0, 0.0);
    const Mat3 nb = xm * normal_pattern(0.0, 1.0);
    grad_normal.record(std::max(std::abs(inner(rgrad, na)) / (egrad.norm() * na.norm()),
                                std::abs(inner(rgrad, nb)) / (egrad.norm() * nb.norm())));

    // Retraction.
    Mat3 xi = project(x, gaussian(rng));
    xi /= xi.norm();
    retract_zero.record((retract(x, Mat3::Zero()).matrix() - xm).norm() / xm.norm());
    try {
      const TrianglePoint small = retract(x, 0.01 * d * xi);
      retract_feasible.record(constraint_residual(small.matrix(), d).cwiseAbs().maxCoeff());

      std::vector<double> hs{1e-2, 1e-3, 1e-4};
      std::vector<double> errs;
      for (const double h : hs) {
        const Mat3 step = h * d * xi;
        errs.push_back((retract(x, step).matrix() - xm - step).norm());
      }
      retract_order.record(std::abs(log_slope(hs, errs) - 2.0));
    } catch (const Error& e) {
      retract_feasible.record(std::numeric_limits<double>::infinity());
      retract_feasible.r.detail = e.what();
    }

    // Riemannian gradient along retraction curves, central differences with a step sweep.
    {
      const double exact = inner(rgrad, xi);
      double best = std::numeric_limits<double>::infinity();
      for (double h = 1e-2 * d; h >= 1e-7 * d; h /= 10.0) {
        try {
          const double fd = (cost.value(retract(x, h * xi).matrix()) - cost.value(retract(x, -h * xi).matrix())) / (2.0 * h);
          best = std::min(best, std::abs(fd - exact) / std::max(rgrad.norm(), kTiny));
        } catch (const RetractionDomain&) {
        }
      }
      grad_fd.record(best);
    }

    // Riemannian Hessian against two oracles, both central differences with one
    // Richardson step (best over a step sweep):
    //  - the smooth ambient extension Y -> P_Y(egrad(Y)) of the gradient field
    //    along the straight line X + t xi, projected at X;
    //  - the gradient field along R_X(t xi), projected at X. The retraction
    //    curve is badly conditioned near its pole, hence the looser tolerance.
    {
      const Mat3 hxi = riemannian_hessian(x, egrad, cost.hessian_apply(xm, xi), xi);
      const auto ambient = [&](double t) {
        const Mat3 y = xm + t * xi;
        return Mat3(ambient_projection(y, cost.gradient(y)));
      };
      const auto along_retraction = [&](double t) {
        const TrianglePoint c = retract(x, t * xi);
        return Mat3(tangent_project(x, project(c, cost.gradient(c.matrix()))));
      };
      const auto richardson_error = [&](const std::function<Mat3(double)>& field) {
        const auto central = [&](double h) { return Mat3((field(h) - field(-h)) / (2.0 * h)); };
        double best = std::numeric_limits<double>::infinity();
        for (double h = 1e-2 * d; h >= 1e-5 * d; h /= 4.0) {
          try {
            const Mat3 rich = project(x, (4.0 * central(0.5 * h) - central(h)) / 3.0);
            best = std::min(best, (rich - hxi).norm() / std::max(hxi.norm(), kTiny));
          } catch (const RetractionDomain&) {
          }
        }
        return best;
      };
      hess_fd.record(richardson_error(ambient));
      hess_retraction_fd.record(richardson_error(along_retraction));

      Mat3 zeta = project(x, gaussian(rng));
      zeta /= zeta.norm();
      const Mat3 hzeta = riemannian_hessian(x, egrad, cost.hessian_apply(xm, zeta), zeta);
      const double scale = hxi.norm() * zeta.norm() + xi.norm() * hzeta.norm();
      hess_sym.record(std::abs(inner(hxi, zeta) - inner(xi, hzeta)) / std::max(scale, kTiny));
    }

    // Euclidean derivatives of the cost at a nearby ambient point.
    {
      const Mat3 amb = xm + 0.05 * gaussian(rng);
      const Mat3 v = gaussian(rng);
      const Mat3 g = cost.gradient(amb);
      const Mat3 hv = cost.hessian_apply(amb, v);
      double best_g = std::numeric_limits<double>::infinity();
      double best_h = std::numeric_limits<double>::infinity();
      for (double h = 1e-3; h >= 1e-8; h /= 10.0) {
        const double fd = (cost.value(amb + h * v) - cost.value(amb - h * v)) / (2.0 * h);
        best_g = std::min(best_g, std::abs(fd - inner(g, v)) / (g.norm() * v.norm()));
        const Mat3 fdh = (cost.gradient(amb + h * v) - cost.gradient(amb - h * v)) / (2.0 * h);
        best_h = std::min(best_h, (fdh - hv).norm() / std::max(hv.norm(), kTiny));
      }
      cost_grad_fd.record(best_g);
      cost_hess_fd.record(best_h);
    }
  }

  std::vector<CheckResult> out;
  for (Tracker* t : {&idempotent, &self_adjoint, &tangent, &grad_normal, &retract_zero, &retract_feasible,
                     &retract_order, &grad_fd, &hess_fd, &hess_retraction_fd, &hess_sym, &cost_grad_fd, &cost_hess_fd}) {
    if (t->r.detail.empty()) t->r.detail = std::to_string(opts.points) + " points";
    out.push_back(t->r);
  }
  return out;
}

bool all_passed(const std::vector<CheckResult>& results) {
  return std::all_of(results.begin(), results.end(), [](const CheckResult& r) { return r.passed; });
}

void print_check_table(std::ostream& os, const std::vector<CheckResult>& results) {
  char line[256];
  std::snprintf(line, sizeof line, "%-48s %12s %12s  %s\n", "check", "worst", "tolerance", "result");
  os << line;
  for (const CheckResult& r : results) {
    std::snprintf(line, sizeof line, "%-48s %12.3e %12.3e  %s\n", r.name.c_str(), r.worst, r.tolerance,
                  r.passed ? "PASS" : "FAIL");
    os << line;
  }
}

}  // namespace eqtri
