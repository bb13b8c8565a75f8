#pragma once

// YAML experiment configuration. Every key is optional; missing keys take the
// defaults of Scenario::reference(). Unknown keys are rejected.

#include "eqtri/sim.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace eqtri {

struct ExperimentConfig {
  Scenario scenario = Scenario::reference();
  std::vector<SolverId> solvers{std::begin(kAllSolvers), std::end(kAllSolvers)};
  std::string output_dir = "results";
};

/// Parses YAML text. Errors are ConfigError with "origin:line:column: " prefixes.
ExperimentConfig parse_config(const std::string& text, const std::string& origin = "<string>");

ExperimentConfig load_config(const std::filesystem::path& path);

/// Fully expanded configuration in a fixed key order with round-trip precision.
/// The output directory is left out.
std::string canonical_yaml(const ExperimentConfig& cfg);

/// 64-bit FNV-1a of canonical_yaml, as 16 hex digits.
std::string config_hash(const ExperimentConfig& cfg);

}  // namespace eqtri
