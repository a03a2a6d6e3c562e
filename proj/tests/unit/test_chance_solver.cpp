#include <doctest.h>

#include "oracles.hpp"
#include "sphrad/chance_solver.hpp"
#include "sphrad/errors.hpp"
#include "sphrad/fixtures.hpp"

#include <cmath>
#include <sstream>
#include <string>

using namespace sphrad;
namespace oracle = sphrad::testing;

namespace {

Vector scalar(double x) { return Vector::Constant(1, x); }

ChanceProblem scalar_problem(std::shared_ptr<const InequalitySystem> sys, double cost, double lo, double hi,
                             double p, Index m = 2) {
  ChanceProblem pr;
  pr.cost = scalar(cost);
  pr.lower = scalar(lo);
  pr.upper = scalar(hi);
  pr.p_level = p;
  pr.system = std::move(sys);
  pr.model = standard_model(m);
  pr.eval_dirs = sample_sphere(m, 10000, 11, SamplingMethod::Qmc);
  pr.validate_dirs = sample_sphere(m, 100000, 12, SamplingMethod::MonteCarlo);
  return pr;
}

}  // namespace

TEST_CASE("one-dimensional halfspace reaches the normal quantile") {
  const ChanceProblem pr = scalar_problem(make_halfspace(Vector::Unit(2, 0)), 1.0, 0.05, 4.0, 0.8);
  const SolveResult r = solve(pr, scalar(3.0));
  CHECK(r.trace.status == SolveStatus::Converged);
  const double expected = oracle::normal_quantile(0.8);
  CHECK(expected == doctest::Approx(0.841621).epsilon(1e-6));
  CHECK(std::abs(r.x(0) - expected) <= 2e-3);
  CHECK(r.prob >= 0.8 - 1e-3);

  const Validation v = validate(r.x, pr);
  CHECK(v.seed == 12);
  CHECK(v.n_directions == 100000);
  CHECK(std::abs(v.value - 0.8) <= 3.0 * v.std_error);

  const FdCheck fd = fd_check(*pr.system, r.x, pr.model, pr.eval_dirs, 1e-5);
  CHECK(fd.rel_err <= 1e-4);
}

TEST_CASE("slab problem at p = 0.5 reaches its closed form") {
  const ChanceProblem pr = scalar_problem(make_slab(Vector::Unit(2, 0), identity_map()), -1.0, -3.0, -0.01, 0.5);
  const SolveResult r = solve(pr, scalar(-2.0));
  const double q = oracle::normal_quantile(0.75);
  const double expected = -0.5 * std::log1p(q * q);
  CHECK(r.trace.status == SolveStatus::Converged);
  CHECK(std::abs(r.x(0) - expected) <= 2e-3);
  // Independent scalar root of 2 Phi(sqrt(e^{-2x} - 1)) - 1 = 0.5.
  const double root = oracle::bisect(
      [](double x) { return 1.5 - 2.0 * oracle::normal_cdf(std::sqrt(std::exp(-2.0 * x) - 1.0)); }, -3.0, -1e-6);
  CHECK(root == doctest::Approx(expected).epsilon(1e-8));
}

TEST_CASE("inactive probability constraint leaves the bound vertex") {
  const ChanceProblem pr = scalar_problem(make_halfspace(Vector::Unit(2, 0)), -1.0, 0.05, 4.0, 0.8);
  const SolveResult r = solve(pr, scalar(1.0));
  CHECK(r.trace.status == SolveStatus::Converged);
  CHECK(r.x(0) == 4.0);
  CHECK(r.cost == -4.0);
}

TEST_CASE("feasibility phase recovers from an infeasible start") {
  const ChanceProblem pr = scalar_problem(make_halfspace(Vector::Unit(2, 0)), 1.0, 0.05, 4.0, 0.8);
  const SolveResult r = solve(pr, scalar(0.1));
  CHECK(r.trace.feasibility_steps > 0);
  CHECK(std::abs(r.x(0) - oracle::normal_quantile(0.8)) <= 2e-3);
}

TEST_CASE("feasible iterates stay feasible") {
  Matrix cov(2, 2);
  cov << 1.0, 0.3, 0.3, 2.0;
  ChanceProblem pr;
  pr.system = make_halfspace(Vector{{0.6, 0.8}}, false);
  pr.cost = Vector{{1.0, 2.0}};
  pr.lower = Vector::Constant(2, -1.0);
  pr.upper = Vector::Constant(2, 0.9);
  pr.p_level = 0.8;
  pr.model = build_model(Vector::Zero(2), cov);
  pr.eval_dirs = sample_sphere(2, 4000, 1, SamplingMethod::Qmc);
  pr.validate_dirs = sample_sphere(2, 4000, 2, SamplingMethod::Qmc);
  const SolverOptions opts;
  const SolveResult r = solve(pr, Vector{{0.5, 0.5}}, opts);
  bool feasible = false;
  for (const auto& rec : r.trace.records) {
    if (feasible && rec.accepted) CHECK(rec.prob >= pr.p_level - opts.infeas_tol);
    if (rec.prob >= pr.p_level - opts.infeas_tol) feasible = true;
  }
  CHECK(feasible);
  CHECK(r.trace.status == SolveStatus::Converged);
  CHECK(std::abs(r.prob - pr.p_level) <= opts.value_tol);
}

TEST_CASE("solves are deterministic") {
  const ChanceProblem pr = scalar_problem(make_slab(Vector{{0.6, 0.8}}, identity_map()), -1.0, -3.0, -0.01, 0.7);
  const SolveResult a = solve(pr, scalar(-2.0));
  const SolveResult b = solve(pr, scalar(-2.0));
  std::ostringstream ja, jb;
  write_trace_jsonl(ja, a.trace);
  write_trace_jsonl(jb, b.trace);
  CHECK(ja.str() == jb.str());
  CHECK(a.x == b.x);
  CHECK(a.trace.records.size() == b.trace.records.size());
}

TEST_CASE("tiny sets validate near zero") {
  const ChanceProblem pr = scalar_problem(make_ball_system(Vector::Zero(2)), 1.0, 0.01, 0.1, 0.8);
  const Validation v = validate(pr.lower, pr);
  const double eval = prob_value(*pr.system, pr.lower, pr.model, pr.eval_dirs).value;
  CHECK(eval == doctest::Approx(1.0 - std::exp(-0.5e-4)).epsilon(1e-9));
  CHECK(v.value <= 1e-4);
  try {
    solve(pr, scalar(0.05));
    FAIL("expected NoFeasibleStart");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NoFeasibleStart);
  }
}

TEST_CASE("problem validation") {
  ChanceProblem pr = scalar_problem(make_halfspace(Vector::Unit(2, 0)), 1.0, 0.05, 4.0, 0.8);
  ChanceProblem same = pr;
  same.validate_dirs = sample_sphere(2, 100, 11, SamplingMethod::MonteCarlo);
  CHECK_THROWS_AS(same.validate(), Error);
  ChanceProblem bad_p = pr;
  bad_p.p_level = 1.0;
  CHECK_THROWS_AS(bad_p.validate(), Error);
  ChanceProblem bad_box = pr;
  bad_box.upper = scalar(0.0);
  CHECK_THROWS_AS(bad_box.validate(), Error);
  CHECK_THROWS_AS(solve(pr, Vector::Zero(2)), Error);
}

TEST_CASE("trace writers") {
  const ChanceProblem pr = scalar_problem(make_halfspace(Vector::Unit(2, 0)), 1.0, 0.05, 4.0, 0.8);
  const SolveResult r = solve(pr, scalar(3.0));
  std::ostringstream jsonl, csv;
  write_trace_jsonl(jsonl, r.trace);
  write_trace_csv(csv, r.trace);
  std::size_t lines = 0;
  std::string line;
  std::istringstream in(jsonl.str());
  while (std::getline(in, line)) {
    ++lines;
    CHECK(line.rfind("{\"iteration\":", 0) == 0);
  }
  CHECK(lines == r.trace.records.size());
  CHECK(csv.str().rfind("iteration,cost,prob\n", 0) == 0);
  CHECK(to_string(SolveStatus::Converged) == "converged");
}
