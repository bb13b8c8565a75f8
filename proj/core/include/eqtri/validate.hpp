#pragma once

// Self-check of the manifold and objective operators on seeded random points.

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace eqtri {

struct CheckResult {
  std::string name;
  bool passed = false;
  double worst = 0.0;      // worst measured value over all points
  double tolerance = 0.0;  // bound the worst value is compared against
  std::string detail;
};

struct ValidationOptions {
  int points = 100;
  std::uint64_t seed = 20240601;
  double side = 0.1;
  /// Test hook: flips the sign of the normal component removed by the
  /// projection, which must make the suite fail.
  bool flip_projection_sign = false;
};

std::vector<CheckResult> run_geometry_suite(const ValidationOptions& opts = {});

bool all_passed(const std::vector<CheckResult>& results);

void print_check_table(std::ostream& os, const std::vector<CheckResult>& results);

}  // namespace eqtri
