#include "sphrad/chance_solver.hpp"

#include "sphrad/errors.hpp"
#include "sphrad/lp.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <string>

namespace sphrad {

std::string_view to_string(SolveStatus status) noexcept {
  return status == SolveStatus::Converged ? "converged" : "iteration_limit";
}

void ChanceProblem::validate() const {
  require(system != nullptr, "chance problem: missing constraint system");
  const Index n = system->x_dim();
  require(cost.size() == n && lower.size() == n && upper.size() == n,
          "chance problem: cost/bounds must match the decision dimension");
  require((upper - lower).minCoeff() >= 0.0, "chance problem: lower bound exceeds upper bound");
  require(p_level > 0.0 && p_level < 1.0, "chance problem: p_level must lie in (0, 1)");
  require(eval_dirs.dim() == model.dim() && validate_dirs.dim() == model.dim(),
          "chance problem: direction sets must match the model dimension");
  require(eval_dirs.seed() != validate_dirs.seed(), "chance problem: evaluation and validation seeds must differ");
}

namespace {

struct Point {
  bool ok = false;
  double prob = 0.0;
  Vector grad;
};

class Oracle {
 public:
  Oracle(const ChanceProblem& problem, const EvalOptions& opts) : problem_(problem), opts_(opts) {}

  // Estimate and gradient on the fixed direction set. A decision at which the
  // mean leaves the feasible set cannot be decomposed and is reported as !ok.
  Point at(const Vector& x) const {
    Point p;
    try {
      const GradEstimate g = prob_gradient(*problem_.system, x, problem_.model, problem_.eval_dirs, opts_);
      p.ok = true;
      p.prob = g.value;
      p.grad = g.gradient;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::InteriorViolated) throw;
    }
    return p;
  }

 private:
  const ChanceProblem& problem_;
  const EvalOptions& opts_;
};

Vector clamp_box(const Vector& x, const Vector& lower, const Vector& upper) {
  return x.cwiseMax(lower).cwiseMin(upper);
}

// Projected ascent on phi until it clears p_level + margin.
int feasibility_phase(const ChanceProblem& problem, const Oracle& oracle, Vector& x, Point& pt,
                      const SolverOptions& opts) {
  const double target = problem.p_level + opts.feasibility_margin;
  const double box = std::max((problem.upper - problem.lower).maxCoeff(), 1e-8);
  double alpha = 0.1 * box;
  int steps = 0;
  double best = pt.prob;
  while (pt.prob < target && steps < opts.feasibility_steps) {
    ++steps;
    const double gnorm = pt.grad.cwiseAbs().maxCoeff();
    if (!(gnorm > 0.0)) break;
    const Vector trial = clamp_box(x + (alpha / gnorm) * pt.grad, problem.lower, problem.upper);
    const Point next = oracle.at(trial);
    if (next.ok && next.prob > pt.prob) {
      x = trial;
      pt = next;
      best = pt.prob;
      alpha = std::min(alpha * 1.5, box);
    } else {
      alpha *= 0.5;
      if (alpha < 1e-12 * box) break;
    }
  }
  if (pt.prob < problem.p_level) {
    fail(ErrorCode::NoFeasibleStart, "feasibility phase reached phi = " + std::to_string(best) +
                                         " < p = " + std::to_string(problem.p_level) + " after " +
                                         std::to_string(steps) + " steps");
  }
  return steps;
}

}  // namespace

SolveResult solve(const ChanceProblem& problem, const Vector& start, const SolverOptions& opts) {
  problem.validate();
  require(start.size() == problem.cost.size(), "solver: start point has wrong dimension");
  require(opts.initial_radius > 0.0 && opts.max_radius >= opts.initial_radius && opts.min_radius > 0.0,
          "solver: invalid trust-region radii");

  const Oracle oracle(problem, opts.eval);
  const Vector& c = problem.cost;
  const double p = problem.p_level;
  const Index n = c.size();

  SolveResult out;
  Vector x = clamp_box(start, problem.lower, problem.upper);
  Point pt = oracle.at(x);
  if (!pt.ok) fail(ErrorCode::NoFeasibleStart, "start point puts the mean outside the feasible set");
  out.trace.feasibility_steps = feasibility_phase(problem, oracle, x, pt, opts);

  double radius = opts.initial_radius;
  double penalty = 0.0;
  auto merit = [&](double cost, double prob) { return cost + penalty * std::max(0.0, p - prob); };

  for (int it = 1; it <= opts.max_iterations; ++it) {
    // Penalty from the current multiplier scale, only once the probability
    // constraint is close to binding; far away the gradient is ~0.
    const bool near_active = pt.prob <= p + 10.0 * opts.value_tol;
    if (near_active) penalty = std::max(penalty, 10.0 * c.norm() / std::max(pt.grad.norm(), 1e-8));

    const Vector d_lo = (problem.lower - x).cwiseMax(-radius);
    const Vector d_hi = (problem.upper - x).cwiseMin(radius);
    // -grad^T d <= phi - p
    const Matrix row = -pt.grad.transpose();
    // Cost-free coordinates are otherwise degenerate in the LP; nudge them
    // along the probability gradient.
    const double gmax = pt.grad.cwiseAbs().maxCoeff();
    const double nudge = gmax > 0.0 ? 1e-6 * std::max(c.cwiseAbs().maxCoeff(), 1.0) / gmax : 0.0;
    const Vector objective = c - nudge * pt.grad;
    lp::Result lin = lp::solve(objective, row, Vector::Constant(1, pt.prob - p), d_lo, d_hi);
    bool restoration = false;
    if (lin.status == lp::Status::Infeasible) {
      // Linearisation cannot reach p inside the region: move towards it.
      lin = lp::solve(-pt.grad, Matrix(0, n), Vector(0), d_lo, d_hi);
      restoration = true;
      if (!near_active) penalty = std::max(penalty, 10.0 * c.norm() / std::max(pt.grad.norm(), 1e-8));
    }
    if (lin.status != lp::Status::Optimal) {
      fail(ErrorCode::LPInfeasible, "trust-region LP failed at iteration " + std::to_string(it));
    }
    const Vector d = lin.x;
    const double step = d.size() ? d.cwiseAbs().maxCoeff() : 0.0;
    const double lin_prob = pt.prob + pt.grad.dot(d);
    const double cost_x = c.dot(x);

    IterationRecord rec;
    rec.iteration = it;
    rec.radius = radius;
    rec.step_norm = step;

    const bool feasible_now = pt.prob >= p - opts.infeas_tol;
    const bool prob_inactive = !restoration && lin_prob > p + opts.value_tol;
    if (step <= opts.step_tol && feasible_now &&
        (std::abs(pt.prob - p) <= opts.value_tol || prob_inactive || pt.prob > p)) {
      rec.x = x;
      rec.cost = cost_x;
      rec.prob = pt.prob;
      rec.accepted = false;
      out.trace.records.push_back(rec);
      out.trace.status = SolveStatus::Converged;
      break;
    }

    const Vector trial_x = clamp_box(x + d, problem.lower, problem.upper);
    const Point trial = oracle.at(trial_x);
    const double pred = merit(cost_x, pt.prob) - merit(c.dot(trial_x), lin_prob);
    bool accepted = false;
    double ratio = 0.0;
    if (trial.ok && pred > 0.0) {
      const double ared = merit(cost_x, pt.prob) - merit(c.dot(trial_x), trial.prob);
      ratio = ared / pred;
      const bool keeps_feasibility = !feasible_now || trial.prob >= p - opts.infeas_tol;
      accepted = keeps_feasibility && ratio >= opts.accept_ratio;
    }

    if (accepted) {
      x = trial_x;
      pt = trial;
      if (ratio > 0.75 && step >= 0.99 * radius) radius = std::min(2.0 * radius, opts.max_radius);
    } else {
      radius *= 0.25;
    }
    rec.x = x;
    rec.cost = c.dot(x);
    rec.prob = pt.prob;
    rec.accepted = accepted;
    out.trace.records.push_back(rec);

    if (!accepted && pred <= 0.0 && pt.prob >= p - opts.infeas_tol) {
      // The model predicts no decrease: first-order stationary for the LP model.
      out.trace.status = SolveStatus::Converged;
      break;
    }
    if (radius < opts.min_radius) {
      if (pt.prob >= p - opts.infeas_tol) {
        out.trace.status = SolveStatus::Converged;
        break;
      }
      fail(ErrorCode::LPInfeasible, "trust region collapsed at an infeasible iterate");
    }
  }

  out.x = x;
  out.cost = c.dot(x);
  out.prob = pt.prob;
  return out;
}

Validation validate(const Vector& x, const ChanceProblem& problem, const EvalOptions& opts) {
  problem.validate();
  const ProbEstimate est = prob_value(*problem.system, x, problem.model, problem.validate_dirs, opts);
  return Validation{est.value, est.std_error, problem.validate_dirs.size(), problem.validate_dirs.seed()};
}

void write_trace_jsonl(std::ostream& os, const SolveTrace& trace) {
  for (const auto& r : trace.records) {
    nlohmann::ordered_json j;
    j["iteration"] = r.iteration;
    j["x"] = std::vector<double>(r.x.data(), r.x.data() + r.x.size());
    j["cost"] = r.cost;
    j["prob"] = r.prob;
    j["step_norm"] = r.step_norm;
    j["radius"] = r.radius;
    j["accepted"] = r.accepted;
    os << j.dump() << '\n';
  }
}

void write_trace_csv(std::ostream& os, const SolveTrace& trace) {
  os << "iteration,cost,prob\n";
  const auto flags = os.flags();
  const auto prec = os.precision();
  os << std::setprecision(17);
  for (const auto& r : trace.records) os << r.iteration << ',' << r.cost << ',' << r.prob << '\n';
  os.flags(flags);
  os.precision(prec);
}

}  // namespace sphrad
