#pragma once

#include "sphrad_app/config.hpp"

#include <json.hpp>

#include <iosfwd>
#include <memory>

namespace sphrad::app {

enum ExitCode : int {
  kOk = 0,
  kConfigError = 2,
  kNumericalError = 3,
  kSolverError = 4,
  kVerifyFailed = 5,
};

std::string_view tool_version() noexcept;

struct Fixture {
  std::shared_ptr<const InequalitySystem> system;
  std::shared_ptr<const ConvexSetOracle> oracle;  // ball and hyperbolic only
  GaussianModel model;
};

Fixture build_fixture(const RunConfig& cfg);

// Each command writes its JSON record to `os` and, when cfg.out is set, to
// files. Errors propagate as exceptions; see run_guarded for the exit mapping.
int cmd_eval(const RunConfig& cfg, std::ostream& os);
int cmd_grad(const RunConfig& cfg, std::ostream& os);
int cmd_solve_energy(const RunConfig& cfg, std::ostream& os);
int cmd_verify(const RunConfig& cfg, std::ostream& os);

// Runs fn, mapping exceptions onto exit codes and printing them to err.
template <class Fn>
int run_guarded(Fn&& fn, std::ostream& err);

int exit_code_for(const std::exception& e) noexcept;

}  // namespace sphrad::app

#include <ostream>

template <class Fn>
int sphrad::app::run_guarded(Fn&& fn, std::ostream& err) {
  try {
    return fn();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
}
