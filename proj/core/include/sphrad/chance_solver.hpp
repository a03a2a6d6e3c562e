#pragma once

#include "sphrad/constraints.hpp"
#include "sphrad/directions.hpp"
#include "sphrad/gaussian.hpp"
#include "sphrad/probability.hpp"

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string_view>
#include <vector>

namespace sphrad {

// min cost^T x  s.t.  phi(x) >= p_level,  lower <= x <= upper.
struct ChanceProblem {
  Vector cost;
  Vector lower;
  Vector upper;
  double p_level = 0.8;
  std::shared_ptr<const InequalitySystem> system;
  GaussianModel model;
  DirectionSet eval_dirs;      // fixed across iterations
  DirectionSet validate_dirs;  // independent seed, used once at the end

  void validate() const;
};

struct SolverOptions {
  double infeas_tol = 1e-3;
  double step_tol = 1e-4;
  double value_tol = 5e-3;
  double initial_radius = 1.0;
  double max_radius = 10.0;
  double min_radius = 1e-9;
  int max_iterations = 2000;
  // Feasibility phase: projected ascent until phi >= p_level + margin.
  int feasibility_steps = 500;
  double feasibility_margin = 1e-3;
  double accept_ratio = 0.1;
  EvalOptions eval;
};

enum class SolveStatus : std::uint8_t { Converged, IterationLimit };

std::string_view to_string(SolveStatus status) noexcept;

struct IterationRecord {
  int iteration = 0;
  Vector x;       // iterate after the step decision
  double cost = 0.0;
  double prob = 0.0;
  double step_norm = 0.0;  // |d|_inf of the trial step
  double radius = 0.0;     // trust radius used for the trial step
  bool accepted = false;
};

struct SolveTrace {
  std::vector<IterationRecord> records;
  SolveStatus status = SolveStatus::IterationLimit;
  int feasibility_steps = 0;
};

struct SolveResult {
  Vector x;
  double cost = 0.0;
  double prob = 0.0;
  SolveTrace trace;
};

// Trust-region sequential linear programming on the common-random-number
// estimate of phi. Throws NoFeasibleStart or LPInfeasible.
SolveResult solve(const ChanceProblem& problem, const Vector& start,
                  const SolverOptions& opts = {});

struct Validation {
  double value = 0.0;
  double std_error = 0.0;
  Index n_directions = 0;
  std::uint64_t seed = 0;
};

Validation validate(const Vector& x, const ChanceProblem& problem,
                    const EvalOptions& opts = {});

// One JSON object per line, one line per iteration.
void write_trace_jsonl(std::ostream& os, const SolveTrace& trace);
// iteration,cost,prob
void write_trace_csv(std::ostream& os, const SolveTrace& trace);

}  // namespace sphrad
