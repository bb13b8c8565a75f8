// eqtri: command-line front end for the triangle-manifold localization library.

#include "eqtri/config.hpp"
#include "eqtri/report.hpp"
#include "eqtri/sim.hpp"
#include "eqtri/validate.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace eqtri;

struct Common {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  std::optional<std::string> out_dir;
  std::optional<std::string> init;
  std::vector<std::string> solvers;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config_path, "YAML experiment configuration")->check(CLI::ExistingFile);
  cmd->add_option("--seed", c.seed, "override experiment.seed");
}

ExperimentConfig resolve(const Common& c) {
  ExperimentConfig cfg = c.config_path.empty() ? ExperimentConfig{} : load_config(c.config_path);
  if (c.seed) cfg.scenario.seed = *c.seed;
  if (c.trials) cfg.scenario.trials = *c.trials;
  if (c.out_dir) cfg.output_dir = *c.out_dir;
  if (c.init) cfg.scenario.init = parse_init_mode(*c.init);
  if (!c.solvers.empty()) {
    cfg.solvers.clear();
    for (const auto& s : c.solvers) cfg.solvers.push_back(parse_solver_id(s));
  }
  cfg.scenario.validate();
  return cfg;
}

int cmd_validate(int points, std::uint64_t seed, bool inject_fault) {
  const auto start = std::chrono::steady_clock::now();
  ValidationOptions opts;
  opts.points = points;
  opts.seed = seed;
  opts.flip_projection_sign = inject_fault;
  const auto results = run_geometry_suite(opts);
  print_check_table(std::cout, results);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool ok = all_passed(results);
  std::printf("%s: %zu checks over %d points in %.3f s\n", ok ? "PASS" : "FAIL", results.size(), points, secs);
  return ok ? 0 : 1;
}

int cmd_solve(const Common& c, std::optional<double> snr, const std::string& solver_name, int trial, bool noiseless,
              bool timing) {
  ExperimentConfig cfg = resolve(c);
  const SolverId solver = parse_solver_id(solver_name);
  Scenario& sc = cfg.scenario;
  const double snr_db = snr.value_or(sc.snr_grid_db.front());
  if (noiseless) sc.direct_noise_scale = 0.0;
  if (noiseless && sc.ranging_mode == RangingMode::Signal) {
    throw ConfigError("--noiseless requires ranging.mode = direct");
  }

  Rng ranging = substream(sc.seed, trial, 0, 0);
  const MeasurementSet meas(sc.beacons, draw_ranges(sc, snr_db, ranging));
  const TrialRecord r = solve_measurements(sc, meas, snr_db, solver, substream(sc.seed, trial, 0, 1));

  std::cout << "solver,snr_db,seed,trial,status,converged,iterations,final_grad_norm,err1_m,err2_m,err3_m,"
               "rms_err_m,g1,g2,side12_m,side23_m,side31_m"
            << (timing ? ",solve_time_s" : "") << "\n";
  std::cout << to_string(r.solver) << ',' << format_number(r.snr_db) << ',' << sc.seed << ',' << trial << ','
            << to_string(r.status) << ',' << (r.converged ? 1 : 0) << ',' << r.iterations << ','
            << format_number(r.final_grad_norm);
  for (int i = 0; i < 3; ++i) std::cout << ',' << format_number(r.position_errors(i));
  std::cout << ',' << format_number(r.rms_error()) << ',' << format_number(r.constraint_residual(0)) << ','
            << format_number(r.constraint_residual(1));
  for (int i = 0; i < 3; ++i) std::cout << ',' << format_number(r.side_lengths(i));
  if (timing) std::cout << ',' << format_number(r.solve_time);
  std::cout << "\n";
  return 0;
}

int cmd_sweep(const Common& c) {
  const ExperimentConfig cfg = resolve(c);
  const auto start = std::chrono::steady_clock::now();
  const SweepResult sweep = run_sweep(cfg.scenario, cfg.solvers);
  const auto bounds = bound_curves(cfg.scenario);
  const CsvProvenance prov{config_hash(cfg), cfg.scenario.seed};
  const auto files = write_sweep_outputs(cfg.output_dir, sweep, bounds, prov);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  std::printf("%-8s %-18s %12s %12s %12s %6s\n", "snr_db", "solver", "rmse_m", "p90_m", "mean_time_s", "conv");
  for (const SummaryStats& s : sweep.summaries) {
    std::printf("%-8g %-18s %12.4e %12.4e %12.4e %3d/%d\n", s.snr_db, std::string(to_string(s.solver)).c_str(),
                s.rmse, s.percentile90, s.mean_time, s.n_converged, s.n_trials);
  }
  for (const auto& f : files) std::printf("wrote %s\n", f.string().c_str());
  std::printf("sweep finished in %.2f s\n", secs);
  return 0;
}

int cmd_bounds(const Common& c) {
  const ExperimentConfig cfg = resolve(c);
  const auto bounds = bound_curves(cfg.scenario);
  const CsvProvenance prov{config_hash(cfg), cfg.scenario.seed};
  write_bounds_csv(std::cout, bounds, prov);
  if (c.out_dir) {
    std::filesystem::create_directories(cfg.output_dir);
    std::ofstream out(std::filesystem::path(cfg.output_dir) / "bounds.csv", std::ios::binary);
    write_bounds_csv(out, bounds, prov);
  }
  return 0;
}

int cmd_calibrate(const Common& c, double snr, int trials) {
  const ExperimentConfig cfg = resolve(c);
  const double kappa = calibrate_direct_noise(cfg.scenario, snr, trials, cfg.scenario.seed);
  const double rmse = signal_range_rmse(cfg.scenario, snr, trials, cfg.scenario.seed);
  std::printf("snr_db=%g trials=%d signal_range_rmse_m=%s direct_noise_scale=%s\n", snr, trials,
              format_number(rmse).c_str(), format_number(kappa).c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Localization of an equilateral transmitter triangle by Riemannian optimization"};
  app.require_subcommand(1);

  int points = 100;
  std::uint64_t validate_seed = ValidationOptions{}.seed;
  bool inject_fault = false;
  auto* validate = app.add_subcommand("validate", "run the manifold/objective property checks");
  validate->add_option("--points", points, "random manifold points")->check(CLI::PositiveNumber);
  validate->add_option("--seed", validate_seed, "seed of the random points");
  validate->add_flag("--inject-projection-fault", inject_fault)->group("");

  Common solve_opts;
  std::optional<double> snr;
  std::string solver_name = "riemannian_tr";
  int trial = 0;
  bool noiseless = false;
  bool timing = false;
  auto* solve = app.add_subcommand("solve", "run one trial and print a CSV row");
  add_common(solve, solve_opts);
  solve->add_option("--snr", snr, "SNR in dB (default: first grid value)");
  solve->add_option("--solver", solver_name, "gauss_newton|projected_gn|riemannian_sd|riemannian_tr|riemannian_newton");
  solve->add_option("--init", solve_opts.init, "random|improved");
  solve->add_option("--trial", trial, "trial index selecting the noise substream")->check(CLI::NonNegativeNumber);
  solve->add_flag("--noiseless", noiseless, "exact ranges (direct mode)");
  solve->add_flag("--timing", timing, "append the wall-clock solve time");

  Common sweep_opts;
  auto* sweep = app.add_subcommand("sweep", "Monte-Carlo sweep; writes CSV files");
  add_common(sweep, sweep_opts);
  sweep->add_option("--trials", sweep_opts.trials, "trials per SNR")->check(CLI::PositiveNumber);
  sweep->add_option("--out-dir", sweep_opts.out_dir, "output directory");
  sweep->add_option("--solver", sweep_opts.solvers, "solver (repeatable)");
  sweep->add_option("--init", sweep_opts.init, "random|improved");

  Common bounds_opts;
  auto* bounds = app.add_subcommand("bounds", "CRB and constrained CRB over the SNR grid");
  add_common(bounds, bounds_opts);
  bounds->add_option("--out-dir", bounds_opts.out_dir, "also write bounds.csv here");

  Common cal_opts;
  double cal_snr = 10.0;
  int cal_trials = 200;
  auto* calibrate = app.add_subcommand("calibrate", "fit direct_noise_scale to signal-mode ranging");
  add_common(calibrate, cal_opts);
  calibrate->add_option("--snr", cal_snr, "SNR in dB");
  calibrate->add_option("--trials", cal_trials, "frames per link")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*validate) return cmd_validate(points, validate_seed, inject_fault);
    if (*solve) return cmd_solve(solve_opts, snr, solver_name, trial, noiseless, timing);
    if (*sweep) return cmd_sweep(sweep_opts);
    if (*bounds) return cmd_bounds(bounds_opts);
    if (*calibrate) return cmd_calibrate(cal_opts, cal_snr, cal_trials);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
