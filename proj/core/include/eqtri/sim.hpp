#pragma once

// Monte-Carlo localization experiments: scenario description, one trial per
// (snr, solver), parallel sweeps with paired noise, and bound curves.

#include "eqtri/bounds.hpp"
#include "eqtri/objective.hpp"
#include "eqtri/signal.hpp"
#include "eqtri/solvers.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace eqtri {

enum class RangingMode { Signal, Direct };
enum class SolverId { GaussNewton, ProjectedGn, RiemannianSd, RiemannianTr, RiemannianNewton };
enum class InitMode { Random, Improved };

std::string_view to_string(RangingMode m);
std::string_view to_string(SolverId s);
std::string_view to_string(InitMode m);

/// Throw ConfigError on unknown names.
RangingMode parse_ranging_mode(std::string_view name);
SolverId parse_solver_id(std::string_view name);
InitMode parse_init_mode(std::string_view name);

bool is_riemannian(SolverId s);

inline constexpr SolverId kAllSolvers[] = {SolverId::GaussNewton, SolverId::ProjectedGn,
                                           SolverId::RiemannianSd, SolverId::RiemannianTr,
                                           SolverId::RiemannianNewton};

struct Scenario {
  Vec3 room{4.0, 4.0, 3.0};
  BeaconSet beacons = BeaconSet::room_default();
  Mat3 truth = Mat3::Zero();
  double side = 0.1;
  SignalParams sig;
  std::vector<double> snr_grid_db{0.0, 5.0, 10.0, 15.0, 20.0};
  int trials = 200;
  std::uint64_t seed = 1;
  RangingMode ranging_mode = RangingMode::Direct;
  /// kappa in sigma_r = c Ts 10^(-snr/20) kappa for direct ranging.
  double direct_noise_scale = 1.0;
  InitMode init = InitMode::Improved;
  SolverConfig solver;

  /// Transmitters at (2,2,1), (2.1,2,1) and the apex above their midpoint.
  static Scenario reference();

  /// Throws ConfigError when the truth is infeasible or outside the room,
  /// trials < 1 or an SNR is not finite.
  void validate() const;

  TrianglePoint truth_point() const { return TrianglePoint(truth, side); }

  /// Standard deviation of the direct-mode range noise at this SNR.
  double direct_sigma(double snr_db) const;
};

struct TrialRecord {
  double snr_db = 0.0;
  SolverId solver = SolverId::GaussNewton;
  Vec3 position_errors = Vec3::Zero();
  double solve_time = 0.0;
  bool converged = false;
  SolverStatus status = SolverStatus::Converged;
  int iterations = 0;
  double final_grad_norm = 0.0;
  Eigen::Vector2d constraint_residual = Eigen::Vector2d::Zero();
  Vec3 side_lengths = Vec3::Zero();
  /// Ranging could not produce all 12 ranges; errors are not meaningful.
  bool ranging_failed = false;

  /// sqrt(mean_i ||x_hat_i - x_i||^2).
  double rms_error() const { return std::sqrt(position_errors.squaredNorm() / 3.0); }
};

/// Independent substream for one purpose of one (trial, snr index) cell.
Rng substream(std::uint64_t seed, int trial, int snr_index, int purpose);

/// Noisy ranges for all 12 links at this SNR; throws NoPeak in signal mode
/// when a correlation peak is lost.
RangeMatrix draw_ranges(const Scenario& sc, double snr_db, Rng& rng);

/// Runs one pipeline on given measurements. init_rng feeds random
/// initialization and the projection start of the improved initialization.
TrialRecord solve_measurements(const Scenario& sc, const MeasurementSet& meas, double snr_db,
                               SolverId solver, Rng init_rng);

/// draw_ranges followed by solve_measurements, both fed from rng.
TrialRecord run_trial(const Scenario& sc, double snr_db, SolverId solver, Rng& rng);

struct SummaryStats {
  double snr_db = 0.0;
  SolverId solver = SolverId::GaussNewton;
  double rmse = 0.0;
  Vec3 rmse_per_transmitter = Vec3::Zero();
  double percentile90 = 0.0;
  double mean_time = 0.0;
  /// Trials with usable ranges; the statistics above are over these.
  int n_trials = 0;
  int n_converged = 0;
  int n_ranging_failed = 0;
  /// Ascending per-trial RMS errors (cumulative error curve).
  std::vector<double> sorted_errors;
};

/// Aggregates records of a single (snr, solver) cell.
SummaryStats summarize(const std::vector<TrialRecord>& records);

struct SweepResult {
  /// Indexed [snr][solver][trial] in the order of the inputs.
  std::vector<std::vector<std::vector<TrialRecord>>> records;
  /// Sorted by (snr, solver order).
  std::vector<SummaryStats> summaries;
};

/// Worker count from EQTRI_WORKERS, otherwise the hardware concurrency.
int default_workers();

/// trials x snr grid x solvers. Every solver at a (trial, snr) cell sees the
/// same ranges and the same initialization stream, so comparisons are paired.
/// The result does not depend on the worker count.
SweepResult run_sweep(const Scenario& sc, const std::vector<SolverId>& solvers, int workers = 0);

struct BoundPoint {
  double snr_db = 0.0;
  double sqrt_trace_crb = 0.0;
  double sqrt_trace_ccrb = 0.0;
};

std::vector<BoundPoint> bound_curves(const Scenario& sc);

/// Signal-mode range RMSE over trials x 12 links at one SNR.
double signal_range_rmse(const Scenario& sc, double snr_db, int trials, std::uint64_t seed);

/// kappa that makes the direct-mode range noise match signal-mode range RMSE at snr_db.
double calibrate_direct_noise(const Scenario& sc, double snr_db, int trials, std::uint64_t seed);

}  // namespace eqtri
