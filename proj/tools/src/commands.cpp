#include "sphrad_app/commands.hpp"

#include "sphrad/errors.hpp"
#include "sphrad/fixtures.hpp"
#include "sphrad_app/verify.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#ifndef SPHRAD_VERSION
#define SPHRAD_VERSION "0.0.0"
#endif

namespace sphrad::app {

using nlohmann::ordered_json;

std::string_view tool_version() noexcept { return SPHRAD_VERSION; }

int exit_code_for(const std::exception& e) noexcept {
  if (dynamic_cast<const ConfigError*>(&e)) return kConfigError;
  if (const auto* err = dynamic_cast<const Error*>(&e)) {
    switch (err->code()) {
      case ErrorCode::InvalidArgument: return kConfigError;
      case ErrorCode::NoFeasibleStart:
      case ErrorCode::LPInfeasible: return kSolverError;
      default: return kNumericalError;
    }
  }
  return kNumericalError;
}

namespace {

Vector to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Index>(v.size()));
}

std::vector<double> to_list(const Vector& v) { return {v.data(), v.data() + v.size()}; }

ordered_json header(const RunConfig& cfg, const char* command) {
  ordered_json j;
  j["tool"] = "sphrad";
  j["version"] = std::string(tool_version());
  j["command"] = command;
  j["config"] = to_json(cfg);
  return j;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  out << text;
}

void emit(const RunConfig& cfg, const ordered_json& record, std::ostream& os) {
  const std::string text = record.dump(2) + "\n";
  os << text;
  if (!cfg.out.empty()) write_file(cfg.out, text);
}

DirectionSet directions_for(const RunConfig& cfg, Index dim) {
  return sample_sphere(dim, cfg.n, cfg.seed, cfg.method);
}

void require_x(const RunConfig& cfg, std::size_t size) {
  if (cfg.x.size() != size) {
    throw ConfigError("fixture '" + cfg.fixture + "' expects x of length " + std::to_string(size) + ", got " +
                      std::to_string(cfg.x.size()));
  }
}

std::string format_active(const std::vector<std::size_t>& active) {
  std::string s;
  for (std::size_t k = 0; k < active.size(); ++k) {
    if (k) s += ';';
    s += std::to_string(active[k]);
  }
  return s;
}

void write_direction_csv(const std::string& path, const ProbEstimate& est) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "direction,rho,contribution,finite,active\n";
  for (const auto& rec : est.per_direction) {
    os << rec.index << ',';
    if (rec.hit.finite) {
      os << rec.hit.rho;
    } else {
      os << "inf";
    }
    os << ',' << rec.contribution << ',' << (rec.hit.finite ? 1 : 0) << ',' << format_active(rec.hit.active) << '\n';
  }
  write_file(path, os.str());
}

ordered_json prob_json(const ProbEstimate& est, Index n) {
  ordered_json r;
  r["value"] = est.value;
  r["std_error"] = est.std_error;
  r["n_directions"] = n;
  r["n_infinite"] = est.n_infinite;
  return r;
}

// Stationarity of min c^T x s.t. phi(x) >= p over a box, using gradient g:
// least-squares multiplier on the free coordinates plus sign conditions on
// the bound-active ones. Residual is relative to |c|_inf.
ordered_json stationarity(const Vector& c, const Vector& g, const Vector& x, const Vector& lo, const Vector& hi) {
  const double tol = 1e-8;
  double gg = 0.0;
  double gc = 0.0;
  for (Index j = 0; j < x.size(); ++j) {
    if (x(j) - lo(j) > tol && hi(j) - x(j) > tol) {
      gg += g(j) * g(j);
      gc += g(j) * c(j);
    }
  }
  const double lambda = gg > 0.0 ? gc / gg : 0.0;
  double residual = 0.0;
  for (Index j = 0; j < x.size(); ++j) {
    const double r = c(j) - lambda * g(j);
    if (x(j) - lo(j) <= tol) {
      residual = std::max(residual, -r);  // lower bound needs r >= 0
    } else if (hi(j) - x(j) <= tol) {
      residual = std::max(residual, r);
    } else {
      residual = std::max(residual, std::abs(r));
    }
  }
  ordered_json s;
  s["multiplier"] = lambda;
  s["residual"] = residual / std::max(c.cwiseAbs().maxCoeff(), 1e-300);
  return s;
}

}  // namespace

Fixture build_fixture(const RunConfig& cfg) {
  cfg.validate();
  Fixture f;
  const Index m = cfg.dim;
  if (cfg.fixture == "halfspace") {
    require_x(cfg, 1);
    f.system = make_halfspace(Vector::Unit(m, 0));
    f.model = standard_model(m);
  } else if (cfg.fixture == "slab") {
    require_x(cfg, 1);
    f.system = make_slab(Vector::Unit(m, 0), identity_map());
    f.model = standard_model(m);
  } else if (cfg.fixture == "ball") {
    require_x(cfg, 1);
    f.system = make_ball_system(Vector::Zero(m));
    f.oracle = make_ball(Vector::Zero(m));
    f.model = standard_model(m);
  } else if (cfg.fixture == "hyperbolic") {
    require_x(cfg, 1);
    f.system = make_hyperbolic_system();
    f.oracle = make_hyperbolic_set();
    f.model = standard_model(2);
  } else if (cfg.fixture == "energy") {
    require_x(cfg, static_cast<std::size_t>(cfg.energy.x_dim()));
    f.system = make_energy_system(cfg.energy);
    f.model = build_energy_covariance(cfg.energy);
  } else {
    f.system = make_constant(-1.0, static_cast<Index>(cfg.x.size()), m);
    f.model = standard_model(m);
  }
  return f;
}

int cmd_eval(const RunConfig& cfg, std::ostream& os) {
  const Fixture f = build_fixture(cfg);
  const Vector x = to_vector(cfg.x);
  const DirectionSet dirs = directions_for(cfg, f.model.dim());
  EvalOptions opts = cfg.eval_options();
  opts.keep_records = !cfg.csv.empty();
  const ProbEstimate est = cfg.eps > 0.0 ? prob_value(*f.oracle, cfg.eps, x, f.model, dirs, opts)
                                         : prob_value(*f.system, x, f.model, dirs, opts);
  if (!cfg.csv.empty()) write_direction_csv(cfg.csv, est);
  ordered_json record = header(cfg, "eval");
  record["result"] = prob_json(est, dirs.size());
  emit(cfg, record, os);
  return kOk;
}

int cmd_grad(const RunConfig& cfg, std::ostream& os) {
  const Fixture f = build_fixture(cfg);
  const Vector x = to_vector(cfg.x);
  const DirectionSet dirs = directions_for(cfg, f.model.dim());
  const EvalOptions opts = cfg.eval_options();
  const bool enlarged = cfg.eps > 0.0;
  const GradEstimate g = enlarged ? prob_gradient_enlarged(*f.oracle, x, cfg.eps, f.model, dirs, opts)
                                  : prob_gradient(*f.system, x, f.model, dirs, opts);
  ordered_json result;
  result["gradient"] = to_list(g.gradient);
  result["std_error"] = to_list(g.std_error);
  result["value"] = g.value;
  result["value_std_error"] = g.value_std_error;
  result["tie_fraction"] = g.tie_fraction;
  result["n_directions"] = dirs.size();
  result["n_infinite"] = g.n_infinite;

  if (cfg.check_fd) {
    ordered_json fd;
    if (enlarged) {
      Vector fd_grad(x.size());
      for (Index j = 0; j < x.size(); ++j) {
        const double h = cfg.fd_step * std::max(1.0, std::abs(x(j)));
        Vector xp = x, xm = x;
        xp(j) += h;
        xm(j) -= h;
        fd_grad(j) = (prob_value(*f.oracle, cfg.eps, xp, f.model, dirs, opts).value -
                      prob_value(*f.oracle, cfg.eps, xm, f.model, dirs, opts).value) /
                     (xp(j) - xm(j));
      }
      const double err = (fd_grad - g.gradient).cwiseAbs().maxCoeff();
      const double scale = g.gradient.cwiseAbs().maxCoeff();
      fd["fd_gradient"] = to_list(fd_grad);
      fd["max_abs_err"] = err;
      fd["fd_rel_err"] = scale > 0.0 ? err / scale : err;
    } else {
      const FdCheck check = fd_check(*f.system, x, f.model, dirs, cfg.fd_step, opts);
      fd["fd_gradient"] = to_list(check.fd_gradient);
      fd["max_abs_err"] = check.max_abs_err;
      fd["fd_rel_err"] = check.rel_err;
      fd["active_set_changed"] = check.active_set_changed;
    }
    fd["step"] = cfg.fd_step;
    result["fd_check"] = fd;
  }
  ordered_json record = header(cfg, "grad");
  record["result"] = result;
  emit(cfg, record, os);
  return kOk;
}

int cmd_solve_energy(const RunConfig& cfg, std::ostream& os) {
  RunConfig local = cfg;
  local.fixture = "energy";
  if (local.quick) {
    local.n = std::min(local.n, 2000);
    local.validate_n = std::min(local.validate_n, 20000);
  }
  local.validate();
  const EnergyParams& params = local.energy;
  const Index dim = params.x_dim();

  ChanceProblem problem;
  problem.cost = params.cost();
  problem.lower = params.lower();
  problem.upper = params.upper();
  problem.p_level = params.p_level;
  problem.system = make_energy_system(params);
  problem.model = build_energy_covariance(params);
  problem.eval_dirs = sample_sphere(dim, local.n, local.seed, local.method);
  problem.validate_dirs = sample_sphere(dim, local.validate_n, local.validate_seed, local.validate_method);

  Vector start(dim);
  start.head(params.periods).setConstant(local.start_wind);
  start.tail(params.periods).setConstant(local.start_gen);

  const SolverOptions opts = local.solver_options();
  const SolveResult sol = solve(problem, start, opts);
  const Validation val = validate(sol.x, problem, opts.eval);
  // A stencil that straddles a constraint switch measures a kink, not the gradient; shrink it.
  double fd_step = local.fd_step;
  FdCheck fd = fd_check(*problem.system, sol.x, problem.model, problem.eval_dirs, fd_step, opts.eval);
  for (int shrink = 0; shrink < 2 && fd.active_set_changed; ++shrink) {
    fd_step /= 10.0;
    fd = fd_check(*problem.system, sol.x, problem.model, problem.eval_dirs, fd_step, opts.eval);
  }

  int accepted = 0;
  for (const auto& r : sol.trace.records) accepted += r.accepted ? 1 : 0;

  ordered_json validation;
  validation["value"] = val.value;
  validation["std_error"] = val.std_error;
  validation["n_directions"] = val.n_directions;
  validation["seed"] = val.seed;
  validation["method"] = std::string(to_string(local.validate_method));

  ordered_json fd_json;
  fd_json["fd_rel_err"] = fd.rel_err;
  fd_json["max_abs_err"] = fd.max_abs_err;
  fd_json["active_set_changed"] = fd.active_set_changed;
  fd_json["step"] = fd_step;
  fd_json["stationarity"] = stationarity(problem.cost, fd.fd_gradient, sol.x, problem.lower, problem.upper);

  ordered_json result;
  result["status"] = std::string(to_string(sol.trace.status));
  result["iterations"] = sol.trace.records.size();
  result["accepted_steps"] = accepted;
  result["feasibility_steps"] = sol.trace.feasibility_steps;
  result["x"] = to_list(sol.x);
  result["p_wind"] = to_list(sol.x.head(params.periods));
  result["p_gen"] = to_list(sol.x.tail(params.periods));
  result["cost"] = sol.cost;
  result["prob"] = sol.prob;
  result["eval_seed"] = local.seed;
  result["validation"] = validation;
  result["fd_check"] = fd_json;

  ordered_json record = header(local, "solve-energy");
  record["result"] = result;
  const std::string text = record.dump(2) + "\n";
  os << text;

  if (!local.out.empty()) {
    const std::filesystem::path dir(local.out);
    std::filesystem::create_directories(dir);
    write_file(dir / "solution.json", text);
    std::ostringstream jsonl;
    write_trace_jsonl(jsonl, sol.trace);
    write_file(dir / "trace.jsonl", jsonl.str());
    std::ostringstream csv;
    write_trace_csv(csv, sol.trace);
    write_file(dir / "trace.csv", csv.str());
    ordered_json vrec;
    vrec["tool"] = "sphrad";
    vrec["version"] = std::string(tool_version());
    vrec["x"] = to_list(sol.x);
    vrec["p_level"] = params.p_level;
    vrec["eval_seed"] = local.seed;
    vrec["validation"] = validation;
    write_file(dir / "validation.json", vrec.dump(2) + "\n");
  }
  return kOk;
}

int cmd_verify(const RunConfig& cfg, std::ostream& os) {
  VerifyOptions vo;
  vo.quick = cfg.quick;
  vo.seed = cfg.seed;
  vo.threads = cfg.threads;
  const std::vector<CheckResult> results = run_checks(vo);
  bool all = true;
  std::size_t width = 5;
  for (const auto& r : results) width = std::max(width, r.name.size());
  ordered_json checks = ordered_json::array();
  for (const auto& r : results) {
    all = all && r.passed;
    os << std::left << std::setw(static_cast<int>(width) + 2) << r.name << (r.passed ? "PASS" : "FAIL") << "  "
       << r.detail << '\n';
    ordered_json c;
    c["name"] = r.name;
    c["passed"] = r.passed;
    c["detail"] = r.detail;
    checks.push_back(c);
  }
  os << (all ? "all checks passed" : "some checks FAILED") << '\n';
  if (!cfg.out.empty()) {
    ordered_json record = header(cfg, "verify");
    record["passed"] = all;
    record["checks"] = checks;
    write_file(cfg.out, record.dump(2) + "\n");
  }
  return all ? kOk : kVerifyFailed;
}

}  // namespace sphrad::app
