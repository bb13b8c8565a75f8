#include "eqtri/sim.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>

namespace eqtri {

namespace {

enum Purpose { kRanging = 0, kInit = 1 };

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void fill_geometry(TrialRecord& rec, const Mat3& estimate, const Mat3& truth, double side) {
  for (int i = 0; i < 3; ++i) {
    rec.position_errors(i) = (estimate.col(i) - truth.col(i)).norm();
  }
  rec.constraint_residual = constraint_residual(estimate, side);
  rec.side_lengths = Vec3((estimate.col(0) - estimate.col(1)).norm(), (estimate.col(1) - estimate.col(2)).norm(),
                          (estimate.col(2) - estimate.col(0)).norm());
}

}  // namespace

Rng substream(std::uint64_t seed, int trial, int snr_index, int purpose) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(snr_index),
                    static_cast<std::uint32_t>(purpose)};
  return Rng(seq);
}

RangeMatrix draw_ranges(const Scenario& sc, double snr_db, Rng& rng) {
  const RangeMatrix truth = exact_ranges(sc.beacons, sc.truth);
  RangeMatrix out;
  if (sc.ranging_mode == RangingMode::Direct) {
    std::normal_distribution<double> normal(0.0, 1.0);
    const double sigma = sc.direct_sigma(snr_db);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 4; ++j) {
        out(i, j) = truth(i, j) + sigma * normal(rng);
      }
    }
    return out;
  }

  const SignalParams sig = sc.sig.at_snr(snr_db);
  const int length = frame_length(truth.maxCoeff(), sig);
  for (int i = 0; i < 3; ++i) {
    const ZcSequence seq = zadoff_chu(sig.K, sig.roots[i]);
    for (int j = 0; j < 4; ++j) {
      const ReceivedFrame frame = simulate_link(seq, truth(i, j), sig, Link{i, j}, length, rng);
      out(i, j) = estimate_range(frame, seq, sig);
    }
  }
  return out;
}

TrialRecord solve_measurements(const Scenario& sc, const MeasurementSet& meas, double snr_db,
                               SolverId solver, Rng init_rng) {
  TrialRecord rec;
  rec.snr_db = snr_db;
  rec.solver = solver;

  const auto start = std::chrono::steady_clock::now();
  Mat3 estimate;
  if (solver == SolverId::GaussNewton) {
    estimate = gauss_newton_trilateration(sc.beacons, meas);
    rec.converged = true;
    rec.status = SolverStatus::Converged;
  } else if (solver == SolverId::ProjectedGn) {
    const SolverReport rep =
        project_to_manifold(gauss_newton_trilateration(sc.beacons, meas), sc.side, sc.solver, init_rng);
    estimate = rep.final_point.matrix();
    rec.converged = rep.converged();
    rec.status = rep.status;
    rec.iterations = rep.iterations;
    rec.final_grad_norm = rep.final_grad_norm;
  } else {
    const TrianglePoint x0 = sc.init == InitMode::Improved
                                 ? improved_init(sc.beacons, meas, sc.side, sc.solver, init_rng)
                                 : random_point(sc.side, init_rng);
    const LocalizationCost cost(sc.beacons, meas);
    const SolverReport rep = solver == SolverId::RiemannianSd   ? riemannian_steepest_descent(cost, x0, sc.solver)
                             : solver == SolverId::RiemannianTr ? riemannian_trust_region(cost, x0, sc.solver)
                                                                : riemannian_newton(cost, x0, sc.solver);
    estimate = rep.final_point.matrix();
    rec.converged = rep.converged();
    rec.status = rep.status;
    rec.iterations = rep.iterations;
    rec.final_grad_norm = rep.final_grad_norm;
  }
  rec.solve_time = seconds_since(start);
  fill_geometry(rec, estimate, sc.truth, sc.side);
  return rec;
}

TrialRecord run_trial(const Scenario& sc, double snr_db, SolverId solver, Rng& rng) {
  const MeasurementSet meas(sc.beacons, draw_ranges(sc, snr_db, rng));
  return solve_measurements(sc, meas, snr_db, solver, rng);
}

SummaryStats summarize(const std::vector<TrialRecord>& records) {
  SummaryStats s;
  if (records.empty()) return s;
  s.snr_db = records.front().snr_db;
  s.solver = records.front().solver;

  double sq_sum = 0.0;
  Vec3 sq_per_tx = Vec3::Zero();
  double time_sum = 0.0;
  for (const TrialRecord& r : records) {
    if (r.ranging_failed) {
      ++s.n_ranging_failed;
      continue;
    }
    ++s.n_trials;
    s.n_converged += r.converged ? 1 : 0;
    sq_per_tx += r.position_errors.cwiseAbs2();
    sq_sum += r.position_errors.squaredNorm();
    time_sum += r.solve_time;
    s.sorted_errors.push_back(r.rms_error());
  }
  if (s.n_trials == 0) return s;

  s.rmse = std::sqrt(sq_sum / (3.0 * s.n_trials));
  s.rmse_per_transmitter = (sq_per_tx / s.n_trials).cwiseSqrt();
  s.mean_time = time_sum / s.n_trials;
  std::sort(s.sorted_errors.begin(), s.sorted_errors.end());
  // Nearest-rank percentile.
  const auto rank = static_cast<std::size_t>(std::ceil(0.9 * static_cast<double>(s.n_trials)));
  s.percentile90 = s.sorted_errors[std::max<std::size_t>(rank, 1) - 1];
  return s;
}

int default_workers() {
  if (const char* env = std::getenv("EQTRI_WORKERS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

SweepResult run_sweep(const Scenario& sc, const std::vector<SolverId>& solvers, int workers) {
  sc.validate();
  const int n_snr = static_cast<int>(sc.snr_grid_db.size());
  const int n_solvers = static_cast<int>(solvers.size());

  SweepResult out;
  out.records.assign(n_snr, std::vector<std::vector<TrialRecord>>(n_solvers, std::vector<TrialRecord>(sc.trials)));

  const int n_cells = n_snr * sc.trials;
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto work = [&] {
    for (int cell = next++; cell < n_cells; cell = next++) {
      const int k = cell / sc.trials;
      const int t = cell % sc.trials;
      const double snr = sc.snr_grid_db[k];
      Rng ranging_rng = substream(sc.seed, t, k, kRanging);
      const Rng init_rng = substream(sc.seed, t, k, kInit);
      try {
        const MeasurementSet meas(sc.beacons, draw_ranges(sc, snr, ranging_rng));
        for (int s = 0; s < n_solvers; ++s) {
          out.records[k][s][t] = solve_measurements(sc, meas, snr, solvers[s], init_rng);
        }
      } catch (const NoPeak&) {
        for (int s = 0; s < n_solvers; ++s) {
          TrialRecord& r = out.records[k][s][t];
          r.snr_db = snr;
          r.solver = solvers[s];
          r.ranging_failed = true;
        }
      } catch (...) {
        // Stop handing out cells and rethrow on the calling thread.
        const std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = n_cells;
      }
    }
  };

  const int n_workers = std::clamp(workers > 0 ? workers : default_workers(), 1, std::max(1, n_cells));
  if (n_workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(n_workers);
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);

  for (int k = 0; k < n_snr; ++k) {
    for (int s = 0; s < n_solvers; ++s) {
      out.summaries.push_back(summarize(out.records[k][s]));
    }
  }
  return out;
}

std::vector<BoundPoint> bound_curves(const Scenario& sc) {
  std::vector<BoundPoint> out;
  out.reserve(sc.snr_grid_db.size());
  for (const double snr : sc.snr_grid_db) {
    const FisherBundle b = fisher_bundle(sc.truth, sc.beacons, sc.sig.at_snr(snr));
    out.push_back({snr, std::sqrt(b.crb.trace()), std::sqrt(b.ccrb.trace())});
  }
  return out;
}

double signal_range_rmse(const Scenario& sc, double snr_db, int trials, std::uint64_t seed) {
  Scenario signal = sc;
  signal.ranging_mode = RangingMode::Signal;
  const RangeMatrix truth = exact_ranges(sc.beacons, sc.truth);
  double sq = 0.0;
  int n = 0;
  for (int t = 0; t < trials; ++t) {
    Rng rng = substream(seed, t, 0, kRanging);
    const RangeMatrix est = draw_ranges(signal, snr_db, rng);
    sq += (est - truth).squaredNorm();
    n += 12;
  }
  return std::sqrt(sq / n);
}

double calibrate_direct_noise(const Scenario& sc, double snr_db, int trials, std::uint64_t seed) {
  Scenario unit = sc;
  unit.direct_noise_scale = 1.0;
  return signal_range_rmse(sc, snr_db, trials, seed) / unit.direct_sigma(snr_db);
}

}  // namespace eqtri
