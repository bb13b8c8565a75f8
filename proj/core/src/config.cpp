#include "eqtri/config.hpp"

#include <yaml-cpp/yaml.h>

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>

namespace eqtri {

namespace {

class Reader {
 public:
  explicit Reader(std::string origin) : origin_(std::move(origin)) {}

  [[noreturn]] void fail(const YAML::Node& node, const std::string& msg) const {
    const YAML::Mark m = node.Mark();
    if (m.is_null()) throw ConfigError(origin_ + ": " + msg);
    throw ConfigError(origin_ + ":" + std::to_string(m.line + 1) + ":" + std::to_string(m.column + 1) + ": " + msg);
  }

  void require_map(const YAML::Node& node, const std::string& where, const std::set<std::string>& keys) const {
    if (!node.IsMap()) fail(node, "'" + where + "' must be a mapping");
    for (const auto& kv : node) {
      const auto key = kv.first.as<std::string>();
      if (!keys.contains(key)) fail(kv.first, "unknown key '" + key + "' in '" + where + "'");
    }
  }

  double number(const YAML::Node& node, const std::string& what) const {
    if (!node.IsScalar()) fail(node, "'" + what + "' must be a number");
    try {
      return node.as<double>();
    } catch (const YAML::Exception&) {
      fail(node, "'" + what + "' must be a number, got '" + node.Scalar() + "'");
    }
  }

  long long integer(const YAML::Node& node, const std::string& what) const {
    if (!node.IsScalar()) fail(node, "'" + what + "' must be an integer");
    try {
      return node.as<long long>();
    } catch (const YAML::Exception&) {
      fail(node, "'" + what + "' must be an integer, got '" + node.Scalar() + "'");
    }
  }

  std::uint64_t unsigned_integer(const YAML::Node& node, const std::string& what) const {
    if (!node.IsScalar()) fail(node, "'" + what + "' must be a non-negative integer");
    try {
      return node.as<std::uint64_t>();
    } catch (const YAML::Exception&) {
      fail(node, "'" + what + "' must be a non-negative integer, got '" + node.Scalar() + "'");
    }
  }

  std::string text(const YAML::Node& node, const std::string& what) const {
    if (!node.IsScalar()) fail(node, "'" + what + "' must be a string");
    return node.Scalar();
  }

  std::vector<double> numbers(const YAML::Node& node, const std::string& what) const {
    if (!node.IsSequence()) fail(node, "'" + what + "' must be a list of numbers");
    std::vector<double> out;
    for (const auto& item : node) out.push_back(number(item, what));
    return out;
  }

  Vec3 vec3(const YAML::Node& node, const std::string& what) const {
    const std::vector<double> v = numbers(node, what);
    if (v.size() != 3) fail(node, "'" + what + "' must have 3 entries");
    return {v[0], v[1], v[2]};
  }

  template <class Fn>
  void rethrow_at(const YAML::Node& node, Fn&& fn) const {
    try {
      fn();
    } catch (const std::exception& e) {
      // Errors raised by the reader already carry a location.
      if (std::string_view(e.what()).starts_with(origin_ + ":")) throw;
      fail(node, e.what());
    }
  }

 private:
  std::string origin_;
};

LinkMatrix link_matrix(const Reader& rd, const YAML::Node& node, const std::string& what) {
  if (node.IsScalar()) return LinkMatrix::Constant(rd.number(node, what));
  if (!node.IsSequence() || node.size() != 3) rd.fail(node, "'" + what + "' must be a number or a 3x4 list");
  LinkMatrix m;
  for (int i = 0; i < 3; ++i) {
    const std::vector<double> row = rd.numbers(node[i], what);
    if (row.size() != 4) rd.fail(node[i], "'" + what + "' rows must have 4 entries");
    for (int j = 0; j < 4; ++j) m(i, j) = row[j];
  }
  return m;
}

void read_scenario(const Reader& rd, const YAML::Node& node, Scenario& sc) {
  rd.require_map(node, "scenario", {"room", "side", "beacons", "truth"});
  if (node["room"]) sc.room = rd.vec3(node["room"], "scenario.room");
  if (node["side"]) sc.side = rd.number(node["side"], "scenario.side");
  if (const YAML::Node b = node["beacons"]) {
    if (!b.IsSequence() || b.size() != 4) rd.fail(b, "'scenario.beacons' must list 4 positions");
    std::array<Vec3, 4> pos;
    for (int j = 0; j < 4; ++j) pos[j] = rd.vec3(b[j], "scenario.beacons");
    rd.rethrow_at(b, [&] { sc.beacons = BeaconSet(pos); });
  }
  if (const YAML::Node t = node["truth"]) {
    if (!t.IsSequence() || t.size() != 3) rd.fail(t, "'scenario.truth' must list 3 positions");
    for (int i = 0; i < 3; ++i) sc.truth.col(i) = rd.vec3(t[i], "scenario.truth");
  }
}

void read_signal(const Reader& rd, const YAML::Node& node, SignalParams& sig) {
  rd.require_map(node, "signal", {"K", "roots", "sample_period", "speed_of_sound", "attenuation"});
  if (node["K"]) sig.K = static_cast<int>(rd.integer(node["K"], "signal.K"));
  if (const YAML::Node r = node["roots"]) {
    if (!r.IsSequence() || r.size() != 3) rd.fail(r, "'signal.roots' must list 3 integers");
    for (int i = 0; i < 3; ++i) sig.roots[i] = static_cast<int>(rd.integer(r[i], "signal.roots"));
  }
  if (node["sample_period"]) sig.sample_period = rd.number(node["sample_period"], "signal.sample_period");
  if (node["speed_of_sound"]) sig.speed_of_sound = rd.number(node["speed_of_sound"], "signal.speed_of_sound");
  if (node["attenuation"]) sig.psi = link_matrix(rd, node["attenuation"], "signal.attenuation");
  rd.rethrow_at(node, [&] { sig.validate(); });
}

void read_ranging(const Reader& rd, const YAML::Node& node, Scenario& sc) {
  rd.require_map(node, "ranging", {"mode", "direct_noise_scale"});
  if (node["mode"]) {
    rd.rethrow_at(node["mode"], [&] { sc.ranging_mode = parse_ranging_mode(rd.text(node["mode"], "ranging.mode")); });
  }
  if (node["direct_noise_scale"]) {
    sc.direct_noise_scale = rd.number(node["direct_noise_scale"], "ranging.direct_noise_scale");
  }
}

void read_experiment(const Reader& rd, const YAML::Node& node, ExperimentConfig& cfg) {
  rd.require_map(node, "experiment", {"snr_db", "trials", "seed", "solvers", "init", "output_dir"});
  Scenario& sc = cfg.scenario;
  if (node["snr_db"]) sc.snr_grid_db = rd.numbers(node["snr_db"], "experiment.snr_db");
  if (node["trials"]) sc.trials = static_cast<int>(rd.integer(node["trials"], "experiment.trials"));
  if (node["seed"]) sc.seed = rd.unsigned_integer(node["seed"], "experiment.seed");
  if (const YAML::Node s = node["solvers"]) {
    if (!s.IsSequence() || s.size() == 0) rd.fail(s, "'experiment.solvers' must be a non-empty list");
    cfg.solvers.clear();
    for (const auto& item : s) {
      rd.rethrow_at(item, [&] { cfg.solvers.push_back(parse_solver_id(rd.text(item, "experiment.solvers"))); });
    }
  }
  if (node["init"]) {
    rd.rethrow_at(node["init"], [&] { sc.init = parse_init_mode(rd.text(node["init"], "experiment.init")); });
  }
  if (node["output_dir"]) cfg.output_dir = rd.text(node["output_dir"], "experiment.output_dir");
}

void read_solver(const Reader& rd, const YAML::Node& node, SolverConfig& s) {
  rd.require_map(node, "solver",
                 {"max_iters", "grad_tol", "step_tol", "wolfe_c1", "wolfe_c2", "backtrack_factor",
                  "max_line_search_steps", "tr_initial_radius", "tr_max_radius", "tr_accept_ratio"});
  if (node["max_iters"]) s.max_iters = static_cast<int>(rd.integer(node["max_iters"], "solver.max_iters"));
  if (node["grad_tol"]) s.grad_tol = rd.number(node["grad_tol"], "solver.grad_tol");
  if (node["step_tol"]) s.step_tol = rd.number(node["step_tol"], "solver.step_tol");
  if (node["wolfe_c1"]) s.wolfe_c1 = rd.number(node["wolfe_c1"], "solver.wolfe_c1");
  if (node["wolfe_c2"]) s.wolfe_c2 = rd.number(node["wolfe_c2"], "solver.wolfe_c2");
  if (node["backtrack_factor"]) s.backtrack_factor = rd.number(node["backtrack_factor"], "solver.backtrack_factor");
  if (node["max_line_search_steps"]) {
    s.max_line_search_steps = static_cast<int>(rd.integer(node["max_line_search_steps"], "solver.max_line_search_steps"));
  }
  if (node["tr_initial_radius"]) s.tr_initial_radius = rd.number(node["tr_initial_radius"], "solver.tr_initial_radius");
  if (node["tr_max_radius"]) s.tr_max_radius = rd.number(node["tr_max_radius"], "solver.tr_max_radius");
  if (node["tr_accept_ratio"]) s.tr_accept_ratio = rd.number(node["tr_accept_ratio"], "solver.tr_accept_ratio");
  rd.rethrow_at(node, [&] { s.validate(); });
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string vec(const Vec3& v) {
  return "[" + num(v(0)) + ", " + num(v(1)) + ", " + num(v(2)) + "]";
}

}  // namespace

ExperimentConfig parse_config(const std::string& text, const std::string& origin) {
  const Reader rd(origin);
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(origin + ":" + std::to_string(e.mark.line + 1) + ":" + std::to_string(e.mark.column + 1) +
                      ": " + e.msg);
  }

  ExperimentConfig cfg;
  if (root.IsNull()) {
    cfg.scenario.validate();
    return cfg;
  }
  rd.require_map(root, "<root>", {"scenario", "signal", "ranging", "experiment", "solver"});
  if (root["scenario"]) read_scenario(rd, root["scenario"], cfg.scenario);
  if (root["signal"]) read_signal(rd, root["signal"], cfg.scenario.sig);
  if (root["ranging"]) read_ranging(rd, root["ranging"], cfg.scenario);
  if (root["experiment"]) read_experiment(rd, root["experiment"], cfg);
  if (root["solver"]) read_solver(rd, root["solver"], cfg.scenario.solver);
  rd.rethrow_at(root, [&] { cfg.scenario.validate(); });
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot open configuration file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.string());
}

std::string canonical_yaml(const ExperimentConfig& cfg) {
  const Scenario& sc = cfg.scenario;
  std::ostringstream os;
  os << "scenario:\n  room: " << vec(sc.room) << "\n  side: " << num(sc.side) << "\n  beacons:\n";
  for (int j = 0; j < 4; ++j) os << "    - " << vec(sc.beacons.beacon(j)) << "\n";
  os << "  truth:\n";
  for (int i = 0; i < 3; ++i) os << "    - " << vec(sc.truth.col(i)) << "\n";
  os << "signal:\n  K: " << sc.sig.K << "\n  roots: [" << sc.sig.roots[0] << ", " << sc.sig.roots[1] << ", "
     << sc.sig.roots[2] << "]\n  sample_period: " << num(sc.sig.sample_period)
     << "\n  speed_of_sound: " << num(sc.sig.speed_of_sound) << "\n  attenuation:\n";
  for (int i = 0; i < 3; ++i) {
    os << "    - [";
    for (int j = 0; j < 4; ++j) os << (j ? ", " : "") << num(sc.sig.psi(i, j));
    os << "]\n";
  }
  os << "ranging:\n  mode: " << to_string(sc.ranging_mode) << "\n  direct_noise_scale: " << num(sc.direct_noise_scale)
     << "\nexperiment:\n  snr_db: [";
  for (std::size_t k = 0; k < sc.snr_grid_db.size(); ++k) os << (k ? ", " : "") << num(sc.snr_grid_db[k]);
  os << "]\n  trials: " << sc.trials << "\n  seed: " << sc.seed << "\n  solvers: [";
  for (std::size_t k = 0; k < cfg.solvers.size(); ++k) os << (k ? ", " : "") << to_string(cfg.solvers[k]);
  // output_dir is deliberately absent: where results go does not change them.
  os << "]\n  init: " << to_string(sc.init) << "\n";
  const SolverConfig& s = sc.solver;
  os << "solver:\n  max_iters: " << s.max_iters << "\n  grad_tol: " << num(s.grad_tol)
     << "\n  step_tol: " << num(s.step_tol) << "\n  wolfe_c1: " << num(s.wolfe_c1)
     << "\n  wolfe_c2: " << num(s.wolfe_c2) << "\n  backtrack_factor: " << num(s.backtrack_factor)
     << "\n  max_line_search_steps: " << s.max_line_search_steps
     << "\n  tr_initial_radius: " << num(s.tr_initial_radius) << "\n  tr_max_radius: " << num(s.tr_max_radius)
     << "\n  tr_accept_ratio: " << num(s.tr_accept_ratio) << "\n";
  return os.str();
}

std::string config_hash(const ExperimentConfig& cfg) {
  std::uint64_t h = 14695981039346656037ULL;
  for (const unsigned char c : canonical_yaml(cfg)) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace eqtri
