#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

namespace {

namespace fs = std::filesystem;

struct CliResult {
  int exit_code = -1;
  std::string out;
};

CliResult run(const std::string& args) {
  const std::string cmd = std::string(EQTRI_CLI_PATH) + " " + args + " 2>/dev/null";
  CliResult r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string config() { return std::string("--config ") + EQTRI_CONFIG_DIR + "/reference.yaml"; }

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  for (std::string f; std::getline(ss, f, ',');) out.push_back(f);
  return out;
}

/// CSV body as header-keyed rows, skipping the provenance comment.
std::vector<std::map<std::string, std::string>> parse_csv(const std::string& text) {
  std::stringstream ss(text);
  std::string line;
  std::vector<std::string> header;
  std::vector<std::map<std::string, std::string>> rows;
  while (std::getline(ss, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (header.empty()) {
      header = split(line);
      continue;
    }
    const auto f = split(line);
    std::map<std::string, std::string> row;
    for (std::size_t k = 0; k < header.size() && k < f.size(); ++k) row[header[k]] = f[k];
    rows.push_back(row);
  }
  return rows;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("eqtri_cli_" + name);
  fs::remove_all(p);
  return p;
}

TEST(Cli, ValidatePassesAndPrintsEveryCheck) {
  const CliResult r = run("validate");
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_NE(r.out.find("projection idempotent"), std::string::npos);
  EXPECT_NE(r.out.find("Hessian vs finite differences"), std::string::npos);
  EXPECT_EQ(r.out.find("FAIL"), std::string::npos);
}

TEST(Cli, ValidateCatchesInjectedProjectionFault) {
  const CliResult r = run("validate --inject-projection-fault");
  EXPECT_NE(r.exit_code, 0);
  EXPECT_NE(r.out.find("FAIL"), std::string::npos);
}

TEST(Cli, NoiselessSolveRecoversTruth) {
  for (const char* solver : {"riemannian_sd", "riemannian_tr", "riemannian_newton"}) {
    const CliResult r = run("solve " + config() + " --noiseless --solver " + solver);
    ASSERT_EQ(r.exit_code, 0) << solver;
    const auto rows = parse_csv(r.out);
    ASSERT_EQ(rows.size(), 1u);
    for (const char* col : {"err1_m", "err2_m", "err3_m"}) EXPECT_LE(std::stod(rows[0].at(col)), 1e-6) << solver;
    EXPECT_EQ(rows[0].at("status"), "converged");
  }
}

TEST(Cli, SolveIsByteDeterministic) {
  const std::string args = "solve " + config() + " --snr 10 --solver riemannian_sd --trial 3";
  const CliResult a = run(args), b = run(args);
  EXPECT_EQ(a.exit_code, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_NE(run("solve " + config() + " --snr 10 --solver riemannian_sd --trial 4").out, a.out);
}

TEST(Cli, UnknownSolverIsAnError) {
  EXPECT_NE(run("solve " + config() + " --solver simplex").exit_code, 0);
  EXPECT_NE(run("solve --config /nonexistent.yaml").exit_code, 0);
}

TEST(Cli, MalformedConfigIsAnError) {
  const fs::path dir = scratch("badcfg");
  fs::create_directories(dir);
  std::ofstream(dir / "bad.yaml") << "experiment:\n  trails: 3\n";
  EXPECT_NE(run("solve --config " + (dir / "bad.yaml").string()).exit_code, 0);
  fs::remove_all(dir);
}

TEST(Cli, SweepWritesDeterministicFiles) {
  const fs::path a = scratch("sweep_a"), b = scratch("sweep_b");
  const std::string common = "sweep " + config() + " --trials 20 --out-dir ";
  ASSERT_EQ(run(common + a.string()).exit_code, 0);
  ASSERT_EQ(run(common + b.string()).exit_code, 0);
  for (const char* name : {"rmse_vs_snr.csv", "bounds.csv", "runtime.csv", "cumulative_error_0.csv",
                           "cumulative_error_20.csv"}) {
    ASSERT_TRUE(fs::exists(a / name)) << name;
    EXPECT_EQ(read_file(a / name).rfind("# config_hash=", 0), 0u) << name;
  }
  for (const char* name : {"rmse_vs_snr.csv", "bounds.csv", "cumulative_error_0.csv", "cumulative_error_10.csv"}) {
    EXPECT_EQ(read_file(a / name), read_file(b / name)) << name;
  }

  for (const auto& row : parse_csv(read_file(a / "bounds.csv"))) {
    EXPECT_LT(std::stod(row.at("sqrt_trace_ccrb_m")), std::stod(row.at("sqrt_trace_crb_m")));
  }
  // 5 SNRs x 5 solvers.
  EXPECT_EQ(parse_csv(read_file(a / "rmse_vs_snr.csv")).size(), 25u);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(Cli, SweepRuntimeTrustRegionNotSlowerThanSteepestDescent) {
  const fs::path dir = scratch("runtime");
  ASSERT_EQ(run("sweep " + config() + " --trials 100 --solver riemannian_sd --solver riemannian_tr --out-dir " +
                dir.string())
                .exit_code,
            0);
  double sd = 0.0, tr = 0.0;
  for (const auto& row : parse_csv(read_file(dir / "runtime.csv"))) {
    const double t = std::stod(row.at("mean_time_s")) * std::stod(row.at("n_trials"));
    (row.at("solver") == "riemannian_tr" ? tr : sd) += t;
  }
  EXPECT_GT(sd, 0.0);
  EXPECT_LE(tr, sd);
  fs::remove_all(dir);
}

TEST(Cli, BoundsPrintsConstrainedBelowUnconstrained) {
  const CliResult r = run("bounds " + config());
  ASSERT_EQ(r.exit_code, 0);
  const auto rows = parse_csv(r.out);
  ASSERT_EQ(rows.size(), 5u);
  for (const auto& row : rows) EXPECT_LT(std::stod(row.at("sqrt_trace_ccrb_m")), std::stod(row.at("sqrt_trace_crb_m")));
}

}  // namespace
