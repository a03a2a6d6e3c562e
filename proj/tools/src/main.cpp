#include "sphrad/errors.hpp"
#include "sphrad_app/commands.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>

namespace {

using sphrad::app::RunConfig;

struct Flags {
  std::string config;
  std::optional<std::string> fixture, x, method, tie_policy, out, csv;
  std::optional<double> eps;
  std::optional<int> n, threads, dim;
  std::optional<std::uint64_t> seed;
  bool check_fd = false;
  bool quick = false;
};

void add_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "JSON run configuration; flags override it");
  cmd->add_option("--fixture", f.fixture, "halfspace | slab | ball | hyperbolic | energy | infinite");
  cmd->add_option("--x", f.x, "decision vector, comma separated");
  cmd->add_option("--dim", f.dim, "random vector dimension for the synthetic fixtures");
  cmd->add_option("--eps", f.eps, "enlargement radius (ball, hyperbolic)");
  cmd->add_option("--n", f.n, "number of sphere directions");
  cmd->add_option("--seed", f.seed, "direction set seed");
  cmd->add_option("--method", f.method, "mc | qmc");
  cmd->add_option("--tie-policy", f.tie_policy, "average | min_index");
  cmd->add_option("--threads", f.threads, "worker threads");
  cmd->add_option("--out", f.out, "output file (eval, grad, verify) or directory (solve-energy)");
  cmd->add_option("--csv", f.csv, "per-direction CSV dump (eval)");
  cmd->add_flag("--check-fd", f.check_fd, "cross-check the gradient by central differences");
  cmd->add_flag("--quick", f.quick, "reduced budgets");
}

RunConfig resolve(const Flags& f) {
  RunConfig cfg = f.config.empty() ? RunConfig{} : sphrad::app::load_config(f.config);
  if (f.fixture) cfg.fixture = *f.fixture;
  if (f.x) cfg.x = sphrad::app::parse_list(*f.x);
  if (f.dim) cfg.dim = *f.dim;
  if (f.eps) cfg.eps = *f.eps;
  if (f.n) cfg.n = *f.n;
  if (f.seed) cfg.seed = *f.seed;
  if (f.method) {
    try {
      cfg.method = sphrad::parse_sampling_method(*f.method);
    } catch (const sphrad::Error& e) {
      throw sphrad::app::ConfigError(e.what());
    }
  }
  if (f.tie_policy) {
    try {
      cfg.tie_policy = sphrad::parse_tie_policy(*f.tie_policy);
    } catch (const sphrad::Error& e) {
      throw sphrad::app::ConfigError(e.what());
    }
  }
  if (f.threads) cfg.threads = *f.threads;
  if (f.out) cfg.out = *f.out;
  if (f.csv) cfg.csv = *f.csv;
  if (f.check_fd) cfg.check_fd = true;
  if (f.quick) cfg.quick = true;
  if (cfg.validate_seed == cfg.seed) cfg.validate_seed = cfg.seed + 1;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gaussian probability functions by spherical-radial decomposition"};
  app.set_version_flag("--version", std::string(sphrad::app::tool_version()));
  app.require_subcommand(1);

  Flags flags;
  auto* eval = app.add_subcommand("eval", "estimate the probability at x");
  auto* grad = app.add_subcommand("grad", "estimate the gradient at x");
  auto* solve = app.add_subcommand("solve-energy", "solve the wind/load dispatch case study");
  auto* verify = app.add_subcommand("verify", "run the built-in check suite");
  for (auto* cmd : {eval, grad, solve, verify}) add_flags(cmd, flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : sphrad::app::kConfigError;
  }

  return sphrad::app::run_guarded(
      [&] {
        const RunConfig cfg = resolve(flags);
        if (eval->parsed()) return sphrad::app::cmd_eval(cfg, std::cout);
        if (grad->parsed()) return sphrad::app::cmd_grad(cfg, std::cout);
        if (solve->parsed()) return sphrad::app::cmd_solve_energy(cfg, std::cout);
        return sphrad::app::cmd_verify(cfg, std::cout);
      },
      std::cerr);
}
