#include "sphrad_app/config.hpp"

#include "sphrad/errors.hpp"

#include <charconv>
#include <fstream>
#include <set>

namespace sphrad::app {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

const std::set<std::string> kFixtures{"halfspace", "slab", "ball", "hyperbolic", "energy", "infinite"};

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

template <class T>
void read(const json& j, const char* key, T& target, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    target = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(where + ": key '" + key + "' has the wrong type");
  }
}

SamplingMethod read_method(const json& j, const char* key, SamplingMethod fallback) {
  if (!j.contains(key)) return fallback;
  std::string name;
  read(j, key, name, "config");
  try {
    return parse_sampling_method(name);
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
}

ordered_json energy_json(const EnergyParams& e) {
  ordered_json j;
  j["periods"] = e.periods;
  j["wind_coeff"] = e.wind_coeff;
  j["mu_wind"] = e.mu_wind;
  j["mu_load"] = e.mu_load;
  j["rho_wind"] = e.rho_wind;
  j["rho_load"] = e.rho_load;
  j["rho_cross"] = e.rho_cross;
  j["var_wind"] = e.var_wind;
  j["var_load"] = e.var_load;
  j["cost_gen"] = e.cost_gen;
  j["wind_lower"] = e.wind_lower;
  j["wind_upper"] = e.wind_upper;
  j["gen_lower"] = e.gen_lower;
  j["gen_upper"] = e.gen_upper;
  j["p_level"] = e.p_level;
  return j;
}

EnergyParams energy_from(const json& j) {
  reject_unknown(j, {"periods", "wind_coeff", "mu_wind", "mu_load", "rho_wind", "rho_load", "rho_cross", "var_wind",
                     "var_load", "cost_gen", "wind_lower", "wind_upper", "gen_lower", "gen_upper", "p_level"},
                 "energy");
  EnergyParams e;
  read(j, "periods", e.periods, "energy");
  read(j, "wind_coeff", e.wind_coeff, "energy");
  read(j, "mu_wind", e.mu_wind, "energy");
  read(j, "mu_load", e.mu_load, "energy");
  read(j, "rho_wind", e.rho_wind, "energy");
  read(j, "rho_load", e.rho_load, "energy");
  read(j, "rho_cross", e.rho_cross, "energy");
  read(j, "var_wind", e.var_wind, "energy");
  read(j, "var_load", e.var_load, "energy");
  read(j, "cost_gen", e.cost_gen, "energy");
  read(j, "wind_lower", e.wind_lower, "energy");
  read(j, "wind_upper", e.wind_upper, "energy");
  read(j, "gen_lower", e.gen_lower, "energy");
  read(j, "gen_upper", e.gen_upper, "energy");
  read(j, "p_level", e.p_level, "energy");
  return e;
}

ordered_json solver_json(const SolverConfig& s) {
  ordered_json j;
  j["infeas_tol"] = s.infeas_tol;
  j["step_tol"] = s.step_tol;
  j["value_tol"] = s.value_tol;
  j["initial_radius"] = s.initial_radius;
  j["max_radius"] = s.max_radius;
  j["min_radius"] = s.min_radius;
  j["max_iterations"] = s.max_iterations;
  j["feasibility_steps"] = s.feasibility_steps;
  j["feasibility_margin"] = s.feasibility_margin;
  return j;
}

SolverConfig solver_from(const json& j) {
  reject_unknown(j, {"infeas_tol", "step_tol", "value_tol", "initial_radius", "max_radius", "min_radius",
                     "max_iterations", "feasibility_steps", "feasibility_margin"},
                 "solver");
  SolverConfig s;
  read(j, "infeas_tol", s.infeas_tol, "solver");
  read(j, "step_tol", s.step_tol, "solver");
  read(j, "value_tol", s.value_tol, "solver");
  read(j, "initial_radius", s.initial_radius, "solver");
  read(j, "max_radius", s.max_radius, "solver");
  read(j, "min_radius", s.min_radius, "solver");
  read(j, "max_iterations", s.max_iterations, "solver");
  read(j, "feasibility_steps", s.feasibility_steps, "solver");
  read(j, "feasibility_margin", s.feasibility_margin, "solver");
  return s;
}

}  // namespace

bool operator==(const EnergyParams& a, const EnergyParams& b) { return energy_json(a) == energy_json(b); }

bool operator==(const RunConfig& a, const RunConfig& b) { return to_json(a) == to_json(b); }

void RunConfig::validate() const {
  if (!kFixtures.count(fixture)) throw ConfigError("unknown fixture '" + fixture + "'");
  if (dim < 1) throw ConfigError("dim must be positive");
  if (x.empty()) throw ConfigError("x must not be empty");
  if (!(eps >= 0.0)) throw ConfigError("eps must be nonnegative");
  if (eps > 0.0 && fixture != "ball" && fixture != "hyperbolic") {
    throw ConfigError("eps > 0 needs a projection fixture (ball or hyperbolic)");
  }
  if (n < 1 || validate_n < 1) throw ConfigError("direction budgets must be positive");
  if (threads < 1) throw ConfigError("threads must be positive");
  if (!(fd_step > 0.0)) throw ConfigError("fd_step must be positive");
  if (validate_seed == seed) throw ConfigError("validate_seed must differ from seed");
  try {
    energy.validate();
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
}

SolverOptions RunConfig::solver_options() const {
  SolverOptions o;
  o.infeas_tol = solver.infeas_tol;
  o.step_tol = solver.step_tol;
  o.value_tol = solver.value_tol;
  o.initial_radius = solver.initial_radius;
  o.max_radius = solver.max_radius;
  o.min_radius = solver.min_radius;
  o.max_iterations = solver.max_iterations;
  o.feasibility_steps = solver.feasibility_steps;
  o.feasibility_margin = solver.feasibility_margin;
  o.eval = eval_options();
  return o;
}

EvalOptions RunConfig::eval_options() const {
  EvalOptions o;
  o.tie_policy = tie_policy;
  o.threads = threads;
  return o;
}

ordered_json to_json(const RunConfig& cfg) {
  ordered_json j;
  j["fixture"] = cfg.fixture;
  j["dim"] = cfg.dim;
  j["x"] = cfg.x;
  j["eps"] = cfg.eps;
  j["n"] = cfg.n;
  j["seed"] = cfg.seed;
  j["method"] = std::string(to_string(cfg.method));
  j["tie_policy"] = std::string(to_string(cfg.tie_policy));
  j["threads"] = cfg.threads;
  j["check_fd"] = cfg.check_fd;
  j["fd_step"] = cfg.fd_step;
  j["quick"] = cfg.quick;
  j["out"] = cfg.out;
  j["csv"] = cfg.csv;
  j["energy"] = energy_json(cfg.energy);
  j["solver"] = solver_json(cfg.solver);
  j["start_wind"] = cfg.start_wind;
  j["start_gen"] = cfg.start_gen;
  j["validate_n"] = cfg.validate_n;
  j["validate_seed"] = cfg.validate_seed;
  j["validate_method"] = std::string(to_string(cfg.validate_method));
  return j;
}

RunConfig from_json(const json& j) {
  reject_unknown(j, {"fixture", "dim", "x", "eps", "n", "seed", "method", "tie_policy", "threads", "check_fd",
                     "fd_step", "quick", "out", "csv", "energy", "solver", "start_wind", "start_gen", "validate_n",
                     "validate_seed", "validate_method"},
                 "config");
  RunConfig cfg;
  read(j, "fixture", cfg.fixture, "config");
  read(j, "dim", cfg.dim, "config");
  read(j, "x", cfg.x, "config");
  read(j, "eps", cfg.eps, "config");
  read(j, "n", cfg.n, "config");
  read(j, "seed", cfg.seed, "config");
  cfg.method = read_method(j, "method", cfg.method);
  if (j.contains("tie_policy")) {
    std::string name;
    read(j, "tie_policy", name, "config");
    try {
      cfg.tie_policy = parse_tie_policy(name);
    } catch (const Error& e) {
      throw ConfigError(e.what());
    }
  }
  read(j, "threads", cfg.threads, "config");
  read(j, "check_fd", cfg.check_fd, "config");
  read(j, "fd_step", cfg.fd_step, "config");
  read(j, "quick", cfg.quick, "config");
  read(j, "out", cfg.out, "config");
  read(j, "csv", cfg.csv, "config");
  if (j.contains("energy")) cfg.energy = energy_from(j.at("energy"));
  if (j.contains("solver")) cfg.solver = solver_from(j.at("solver"));
  read(j, "start_wind", cfg.start_wind, "config");
  read(j, "start_gen", cfg.start_gen, "config");
  read(j, "validate_n", cfg.validate_n, "config");
  read(j, "validate_seed", cfg.validate_seed, "config");
  cfg.validate_method = read_method(j, "validate_method", cfg.validate_method);
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file '" + path + "': " + e.what());
  }
  return from_json(j);
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = std::min(text.find(',', pos), text.size());
    const char* first = text.data() + pos;
    const char* last = text.data() + comma;
    while (first < last && *first == ' ') ++first;
    while (last > first && last[-1] == ' ') --last;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || first == last) {
      throw ConfigError("cannot parse number list '" + text + "'");
    }
    out.push_back(v);
    pos = comma + 1;
  }
  return out;
}

}  // namespace sphrad::app
