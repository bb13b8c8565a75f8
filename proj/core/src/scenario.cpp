#include "eqtri/sim.hpp"

#include <cmath>
#include <string>

namespace eqtri {

std::string_view to_string(RangingMode m) {
  return m == RangingMode::Signal ? "signal" : "direct";
}

std::string_view to_string(SolverId s) {
  switch (s) {
    case SolverId::GaussNewton: return "gauss_newton";
    case SolverId::ProjectedGn: return "projected_gn";
    case SolverId::RiemannianSd: return "riemannian_sd";
    case SolverId::RiemannianTr: return "riemannian_tr";
    case SolverId::RiemannianNewton: return "riemannian_newton";
  }
  return "unknown";
}

std::string_view to_string(InitMode m) {
  return m == InitMode::Random ? "random" : "improved";
}

RangingMode parse_ranging_mode(std::string_view name) {
  if (name == "signal") return RangingMode::Signal;
  if (name == "direct") return RangingMode::Direct;
  throw ConfigError("unknown ranging mode '" + std::string(name) + "' (expected signal|direct)");
}

SolverId parse_solver_id(std::string_view name) {
  for (const SolverId s : kAllSolvers) {
    if (to_string(s) == name) return s;
  }
  throw ConfigError("unknown solver '" + std::string(name) +
                    "' (expected gauss_newton|projected_gn|riemannian_sd|riemannian_tr|riemannian_newton)");
}

InitMode parse_init_mode(std::string_view name) {
  if (name == "random") return InitMode::Random;
  if (name == "improved") return InitMode::Improved;
  throw ConfigError("unknown init mode '" + std::string(name) + "' (expected random|improved)");
}

bool is_riemannian(SolverId s) {
  return s == SolverId::RiemannianSd || s == SolverId::RiemannianTr || s == SolverId::RiemannianNewton;
}

Scenario Scenario::reference() {
  Scenario sc;
  sc.truth.col(0) = Vec3(2.0, 2.0, 1.0);
  sc.truth.col(1) = Vec3(2.1, 2.0, 1.0);
  sc.truth.col(2) = Vec3(2.05, 2.0, 1.0 + std::sqrt(3.0) / 20.0);
  return sc;
}

void Scenario::validate() const {
  if (!(side > 0.0)) throw ConfigError("side length must be positive");
  try {
    (void)truth_point();
  } catch (const NotOnManifold& e) {
    throw ConfigError(std::string("truth is not an admissible triangle: ") + e.what());
  }
  for (int i = 0; i < 3; ++i) {
    for (int k = 0; k < 3; ++k) {
      if (truth(k, i) < 0.0 || truth(k, i) > room(k)) {
        throw ConfigError("transmitter " + std::to_string(i + 1) + " lies outside the room");
      }
    }
  }
  if (trials < 1) throw ConfigError("trials must be at least 1");
  if (snr_grid_db.empty()) throw ConfigError("snr grid is empty");
  for (const double s : snr_grid_db) {
    if (!std::isfinite(s)) throw ConfigError("snr values must be finite");
  }
  if (!(direct_noise_scale >= 0.0) || !std::isfinite(direct_noise_scale)) {
    throw ConfigError("direct_noise_scale must be finite and non-negative");
  }
  try {
    sig.validate();
    solver.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
}

double Scenario::direct_sigma(double snr_db) const {
  return sig.range_resolution() * std::pow(10.0, -snr_db / 20.0) * direct_noise_scale;
}

}  // namespace eqtri
