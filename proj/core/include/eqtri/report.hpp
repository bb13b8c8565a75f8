#pragma once

// CSV output of sweeps and bounds. Numbers use 9 significant digits, rows are
// sorted by (snr, solver name), and every file starts with a comment line
// "# config_hash=<hex> seed=<n>" followed by the header row.

#include "eqtri/sim.hpp"

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

namespace eqtri {

struct CsvProvenance {
  std::string config_hash;
  std::uint64_t seed = 0;
};

std::string format_number(double v);

/// snr_db,solver,rmse_m,p90_m,n_trials,n_converged,n_ranging_failed
void write_rmse_csv(std::ostream& os, const std::vector<SummaryStats>& summaries, const CsvProvenance& prov);

/// solver,rank,error_m,cdf for every summary at snr_db.
void write_cumulative_csv(std::ostream& os, double snr_db, const std::vector<SummaryStats>& summaries,
                          const CsvProvenance& prov);

/// snr_db,solver,mean_time_s,mean_iterations,n_trials. Wall-clock columns vary between runs.
void write_runtime_csv(std::ostream& os, const SweepResult& sweep, const CsvProvenance& prov);

/// snr_db,sqrt_trace_crb_m,sqrt_trace_ccrb_m
void write_bounds_csv(std::ostream& os, const std::vector<BoundPoint>& bounds, const CsvProvenance& prov);

/// "cumulative_error_<snr>.csv" with the SNR in %g form.
std::string cumulative_file_name(double snr_db);

/// Writes rmse_vs_snr.csv, cumulative_error_<snr>.csv per SNR, runtime.csv
/// and bounds.csv into dir (created if needed). Returns the paths written.
std::vector<std::filesystem::path> write_sweep_outputs(const std::filesystem::path& dir, const SweepResult& sweep,
                                                       const std::vector<BoundPoint>& bounds,
                                                       const CsvProvenance& prov);

}  // namespace eqtri
