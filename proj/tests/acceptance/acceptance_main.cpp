// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "eqtri/bounds.hpp"
#include "eqtri/config.hpp"
#include "eqtri/report.hpp"
#include "eqtri/sim.hpp"
#include "eqtri/validate.hpp"
#include "oracles.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace eqtri;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

int failures = 0;

void report(int id, const char* title, double budget_s, const std::function<Outcome()>& body) {
  const auto start = Clock::now();
  Outcome out;
  try {
    out = body();
  } catch (const std::exception& e) {
    out = {false, std::string("exception: ") + e.what()};
  }
  const double elapsed = std::chrono::duration<double>(Clock::now() - start).count();
  const bool in_budget = budget_s <= 0.0 || elapsed < budget_s;
  if (!in_budget) out.detail += "; over time budget";
  while (out.detail.ends_with("; ")) out.detail.resize(out.detail.size() - 2);
  const bool pass = out.pass && in_budget;
  if (!pass) ++failures;
  std::printf("%s criterion %d (%s): %s [%.2f s", pass ? "PASS" : "FAIL", id, title, out.detail.c_str(), elapsed);
  if (budget_s > 0.0) std::printf(" of %.0f s", budget_s);
  std::printf("]\n");
  std::fflush(stdout);
}

const SummaryStats& find(const std::vector<SummaryStats>& s, double snr, SolverId id) {
  for (const SummaryStats& x : s) {
    if (x.snr_db == snr && x.solver == id) return x;
  }
  throw std::runtime_error("missing summary for " + std::string(to_string(id)));
}

double min_eigenvalue(const Mat9& m) {
  return Eigen::SelfAdjointEigenSolver<Mat9>(0.5 * (m + m.transpose())).eigenvalues().minCoeff();
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Drops the wall-clock column of runtime.csv.
std::string without_timing(const std::string& csv) {
  std::stringstream in(csv), out;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line[0] != '#') {
      const auto a = line.find(',', line.find(',') + 1);
      const auto b = line.find(',', a + 1);
      line.erase(a, b - a);
    }
    out << line << "\n";
  }
  return out.str();
}

constexpr SolverId kRiemannian[] = {SolverId::RiemannianSd, SolverId::RiemannianTr, SolverId::RiemannianNewton};

}  // namespace

int main() {
  const ExperimentConfig cfg = load_config(std::string(EQTRI_CONFIG_DIR) + "/reference.yaml");
  const Scenario& sc = cfg.scenario;
  std::printf("reference config hash %s, seed %llu, kappa %.6g\n", config_hash(cfg).c_str(),
              static_cast<unsigned long long>(sc.seed), sc.direct_noise_scale);

  report(1, "geometry suite, 100 points", 10.0, [] {
    ValidationOptions opts;
    opts.points = 100;
    const std::vector<CheckResult> checks = run_geometry_suite(opts);
    std::string detail;
    for (const CheckResult& c : checks) {
      if (!c.passed) detail += c.name + " " + fmt("%.3g", c.worst) + " > " + fmt("%.3g", c.tolerance) + "; ";
    }
    if (detail.empty()) detail = std::to_string(checks.size()) + " checks within tolerance";
    return Outcome{all_passed(checks), detail};
  });

  report(2, "noiseless recovery", 3.0, [&] {
    Scenario exact = sc;
    exact.direct_noise_scale = 0.0;
    const MeasurementSet meas(exact.beacons, exact_ranges(exact.beacons, exact.truth));
    bool pass = true;
    std::string detail;
    for (const InitMode init : {InitMode::Improved, InitMode::Random}) {
      exact.init = init;
      for (const SolverId s : kRiemannian) {
        const auto start = Clock::now();
        const TrialRecord r = solve_measurements(exact, meas, 0.0, s, substream(exact.seed, 0, 0, 1));
        const double t = std::chrono::duration<double>(Clock::now() - start).count();
        const bool ok = r.position_errors.maxCoeff() <= 1e-6 && r.final_grad_norm <= 1e-10 && r.iterations <= 1000 &&
                        t < 1.0;
        pass = pass && ok;
        detail += std::string(to_string(s)) + "/" + std::string(to_string(init)) + " err " +
                  fmt("%.1e", r.position_errors.maxCoeff()) + " grad " + fmt("%.1e", r.final_grad_norm) + " it " +
                  std::to_string(r.iterations) + (ok ? "" : " (bad)") + "; ";
      }
    }
    return Outcome{pass, detail};
  });

  report(3, "CCRB below CRB, K = 151", 5.0, [&] {
    bool pass = sc.sig.K == 151;
    std::string detail;
    for (const double snr : {0.0, 5.0, 10.0, 15.0, 20.0}) {
      const FisherBundle b = fisher_bundle(sc.truth, sc.beacons, sc.sig.at_snr(snr));
      const double gap = min_eigenvalue(b.crb - b.ccrb) / b.crb.trace();
      const bool ok = b.ccrb.trace() < b.crb.trace() && gap >= -1e-10;
      pass = pass && ok;
      detail += fmt("%g dB", snr) + " tr " + fmt("%.3e", b.ccrb.trace()) + "<" + fmt("%.3e", b.crb.trace()) +
                " mineig/tr " + fmt("%.1e", gap) + "; ";
    }
    return Outcome{pass, detail};
  });

  report(4, "FIM structure and Monte-Carlo oracle", 60.0, [&] {
    const Mat9 j = assemble_fim(fim_blocks(sc.truth, sc.beacons, sc.sig.at_snr(10.0)));
    bool block = true;
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        if (a != b) block = block && (j.block<3, 3>(3 * a, 3 * b).array() == 0.0).all();
      }
    }
    SignalParams small = sc.sig;
    small.K = 15;
    small.roots = {1, 2, 4};
    small = small.at_snr(10.0);
    Rng rng(sc.seed);
    const Mat9 mc = testing::monte_carlo_fisher(sc.truth, sc.beacons, small, 10000, rng);
    const Mat9 jk = assemble_fim(fim_blocks(sc.truth, sc.beacons, small));
    const double rel = std::abs(mc.trace() - jk.trace()) / jk.trace();
    return Outcome{block && rel <= 0.10, std::string("off-diagonal blocks ") + (block ? "exactly zero" : "NONZERO") +
                                             "; K = 15, 1e4 draws, |tr MC - tr J| / tr J = " + fmt("%.4f", rel) +
                                             " (<= 0.10)"};
  });

  // Criteria 5 to 8 share the reference sweep.
  Scenario mc = sc;
  mc.ranging_mode = RangingMode::Direct;
  mc.trials = 200;
  const std::vector<SolverId> solvers(std::begin(kAllSolvers), std::end(kAllSolvers));
  SweepResult sweep;
  double sweep_seconds = 0.0;

  report(5, "Monte-Carlo ordering, 200 trials, direct noise", 300.0, [&] {
    const auto start = Clock::now();
    sweep = run_sweep(mc, solvers);
    sweep_seconds = std::chrono::duration<double>(Clock::now() - start).count();
    const auto& s = sweep.summaries;
    bool pass = true;
    std::string detail;
    for (const double snr : {0.0, 10.0, 20.0}) {
      const double gn = find(s, snr, SolverId::GaussNewton).rmse;
      const double pgn = find(s, snr, SolverId::ProjectedGn).rmse;
      for (const SolverId id : {SolverId::RiemannianSd, SolverId::RiemannianTr}) {
        if (!(find(s, snr, id).rmse < gn)) {
          pass = false;
          detail += std::string(to_string(id)) + " not below GN at " + fmt("%g dB", snr) + "; ";
        }
      }
      // Ordering Riemannian <= projected GN <= GN.
      for (const SolverId id : kRiemannian) {
        if (!(find(s, snr, id).rmse <= pgn)) {
          pass = false;
          detail += std::string(to_string(id)) + " above projected_gn at " + fmt("%g dB", snr) + "; ";
        }
      }
      if (!(pgn <= gn)) {
        pass = false;
        detail += "projected_gn above GN at " + fmt("%g dB", snr) + "; ";
      }
      detail += fmt("%g dB", snr) + " rmse GN " + fmt("%.3e", gn) + " pGN " + fmt("%.3e", pgn) + " SD " +
                fmt("%.3e", find(s, snr, SolverId::RiemannianSd).rmse) + " TR " +
                fmt("%.3e", find(s, snr, SolverId::RiemannianTr).rmse) + "; ";
    }
    for (const SolverId id : solvers) {
      double previous = std::numeric_limits<double>::infinity();
      for (const double snr : mc.snr_grid_db) {
        const double r = find(s, snr, id).rmse;
        if (r > previous) {
          pass = false;
          detail += std::string(to_string(id)) + " RMSE rises at " + fmt("%g dB", snr) + "; ";
        }
        previous = r;
      }
    }
    for (const SolverId id : {SolverId::RiemannianSd, SolverId::RiemannianTr}) {
      const double p90 = find(s, 20.0, id).percentile90;
      const bool in_band = p90 >= 0.2e-3 && p90 <= 20e-3;
      pass = pass && in_band;
      detail += std::string(to_string(id)) + " p90 at 20 dB " + fmt("%.3f mm", p90 * 1e3) +
                (in_band ? " in [0.2, 20] mm" : " OUTSIDE [0.2, 20] mm") + "; ";
    }
    return Outcome{pass, detail};
  });

  report(6, "runtime ordering TR <= SD", 0.0, [&] {
    double sd = 0.0, tr = 0.0;
    for (const SummaryStats& x : sweep.summaries) {
      if (x.solver == SolverId::RiemannianSd) sd += x.mean_time;
      if (x.solver == SolverId::RiemannianTr) tr += x.mean_time;
    }
    const double n = static_cast<double>(mc.snr_grid_db.size());
    return Outcome{tr <= sd && sd > 0.0, "mean per-solve time TR " + fmt("%.3e s", tr / n) + ", SD " +
                                            fmt("%.3e s", sd / n)};
  });

  report(7, "feasibility audit", 0.0, [&] {
    const double d = mc.side;
    int n = 0, constraints_ok = 0, third_ok = 0;
    double worst_g = 0.0, worst_side = 0.0;
    for (const auto& per_snr : sweep.records) {
      for (const auto& cell : per_snr) {
        for (const TrialRecord& r : cell) {
          if (!is_riemannian(r.solver) || r.ranging_failed) continue;
          ++n;
          const double g = r.constraint_residual.cwiseAbs().maxCoeff();
          const double side = std::abs(r.side_lengths(0) - d) / d;
          worst_g = std::max(worst_g, g);
          worst_side = std::max(worst_side, side);
          constraints_ok += g <= 1e-9 * d * d ? 1 : 0;
          third_ok += side <= 1e-6 ? 1 : 0;
        }
      }
    }
    return Outcome{n > 0 && constraints_ok == n && third_ok == n,
                   std::to_string(constraints_ok) + "/" + std::to_string(n) + " within 1e-9 d^2 (worst " +
                       fmt("%.2e", worst_g / (d * d)) + " d^2); " + std::to_string(third_ok) + "/" +
                       std::to_string(n) + " with | |x1-x2| - d | <= 1e-6 d (worst " + fmt("%.2e", worst_side) +
                       " relative)"};
  });

  report(8, "determinism of sweep CSVs", 0.0, [&] {
    const fs::path root = fs::temp_directory_path() / "eqtri_acceptance";
    fs::remove_all(root);
    const CsvProvenance prov{config_hash(cfg), mc.seed};
    const std::vector<BoundPoint> bounds = bound_curves(mc);
    const auto first = write_sweep_outputs(root / "first", sweep, bounds, prov);
    const auto second = write_sweep_outputs(root / "second", run_sweep(mc, solvers), bound_curves(mc), prov);
    bool pass = first.size() == second.size();
    int identical = 0;
    std::string detail;
    for (std::size_t k = 0; pass && k < first.size(); ++k) {
      std::string a = read_file(first[k]), b = read_file(second[k]);
      if (first[k].filename() == "runtime.csv") {
        a = without_timing(a);
        b = without_timing(b);
      }
      if (a == b) {
        ++identical;
      } else {
        pass = false;
        detail += first[k].filename().string() + " differs; ";
      }
    }
    fs::remove_all(root);
    return Outcome{pass, detail + std::to_string(identical) + "/" + std::to_string(first.size()) +
                             " files byte-identical (runtime.csv compared without its wall-clock column)"};
  });

  std::printf("sweep wall time %.2f s; %d criteria failed\n", sweep_seconds, failures);
  return failures == 0 ? 0 : 1;
}
