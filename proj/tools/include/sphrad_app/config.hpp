#pragma once

#include "sphrad/chance_solver.hpp"
#include "sphrad/directions.hpp"
#include "sphrad/energy.hpp"
#include "sphrad/probability.hpp"

#include <json.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace sphrad::app {

// Malformed configuration or flags; maps to exit status 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SolverConfig {
  double infeas_tol = 1e-3;
  double step_tol = 1e-4;
  double value_tol = 5e-3;
  double initial_radius = 1.0;
  double max_radius = 10.0;
  double min_radius = 1e-9;
  int max_iterations = 2000;
  int feasibility_steps = 500;
  double feasibility_margin = 1e-3;

  bool operator==(const SolverConfig&) const = default;
};

struct RunConfig {
  std::string fixture = "halfspace";
  int dim = 2;  // z dimension for halfspace, slab, ball and infinite
  std::vector<double> x{1.0};
  double eps = 0.0;  // > 0 selects the enlarged set (ball, hyperbolic)
  int n = 10000;
  std::uint64_t seed = 1;
  SamplingMethod method = SamplingMethod::Qmc;
  TiePolicy tie_policy = TiePolicy::Average;
  int threads = 1;
  bool check_fd = false;
  double fd_step = 1e-5;
  bool quick = false;
  std::string out;
  std::string csv;

  EnergyParams energy;
  SolverConfig solver;
  double start_wind = 0.0;
  double start_gen = 20.0;
  int validate_n = 100000;
  std::uint64_t validate_seed = 2;
  SamplingMethod validate_method = SamplingMethod::MonteCarlo;

  void validate() const;
  SolverOptions solver_options() const;
  EvalOptions eval_options() const;
};

bool operator==(const EnergyParams& a, const EnergyParams& b);
bool operator==(const RunConfig& a, const RunConfig& b);

nlohmann::ordered_json to_json(const RunConfig& cfg);
// Missing keys keep their defaults; unknown keys throw ConfigError.
RunConfig from_json(const nlohmann::json& j);
RunConfig load_config(const std::string& path);

std::vector<double> parse_list(const std::string& text);

}  // namespace sphrad::app
