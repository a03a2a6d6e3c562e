#pragma once

#include "sphrad/constraints.hpp"
#include "sphrad/directions.hpp"
#include "sphrad/gaussian.hpp"
#include "sphrad/radial.hpp"

#include <cstdint>
#include <functional>
#include <string_view>
#include <vector>

namespace sphrad {

enum class TiePolicy : std::uint8_t { Average, MinIndex };

std::string_view to_string(TiePolicy policy) noexcept;
TiePolicy parse_tie_policy(std::string_view name);

struct EvalOptions {
  RootOptions root;
  TiePolicy tie_policy = TiePolicy::Average;
  // Guard on <grad_z g_i, L v> (or <residual, L v>) in the gradient formula.
  double slope_floor = 1e-12;
  // Worker threads for the per-direction map; results do not depend on it.
  int threads = 1;
  bool keep_records = false;
};

struct DirectionRecord {
  Index index = 0;
  RadialHit hit;
  double contribution = 0.0;  // e(x, v) = chi_cdf(rho)
};

struct ProbEstimate {
  double value = 0.0;
  // Sample standard deviation of the contributions over sqrt(N); antithetic
  // pairs are averaged first. For QMC sets this is the i.i.d.-equivalent
  // bound, not the scrambled-net error.
  double std_error = 0.0;
  std::size_t n_infinite = 0;
  std::vector<DirectionRecord> per_direction;  // only with keep_records
};

struct GradEstimate {
  Vector gradient;
  Vector std_error;
  double value = 0.0;  // probability from the same pass
  double value_std_error = 0.0;
  double tie_fraction = 0.0;
  std::size_t n_infinite = 0;
  std::vector<Vector> per_direction;  // w(v), only with keep_records
};

// phi(x) = sum_k w_k chi_cdf(rho(x, v_k)) with chi_cdf(inf) = 1.
ProbEstimate prob_value(const InequalitySystem& sys, const Vector& x, const GaussianModel& model,
                        const DirectionSet& dirs, const EvalOptions& opts = {});

// phi_eps(x) = P[xi in S(x) + eps B].
ProbEstimate prob_value(const ConvexSetOracle& oracle, double eps, const Vector& x,
                        const GaussianModel& model, const DirectionSet& dirs,
                        const EvalOptions& opts = {});

// Per direction w(v) = -chi_pdf(rho) sum_{i active} lambda_i grad_x g_i / <grad_z g_i, L v>,
// zero on infinite or domain-limited directions.
GradEstimate prob_gradient(const InequalitySystem& sys, const Vector& x, const GaussianModel& model,
                           const DirectionSet& dirs, const EvalOptions& opts = {});

// d/dx of phi_eps using the oracle's sensitivity of d^2/2 in x.
GradEstimate prob_gradient_enlarged(const ConvexSetOracle& oracle, const Vector& x, double eps,
                                    const GaussianModel& model, const DirectionSet& dirs,
                                    const EvalOptions& opts = {});

GrowthDiagnostic growth_report(const InequalitySystem& sys, const Vector& x,
                               const DirectionSet& dirs, const GaussianModel& model,
                               const EvalOptions& opts = {});

// Central differences of prob_value with the same direction set.
struct FdCheck {
  Vector fd_gradient;
  Vector gradient;
  double max_abs_err = 0.0;
  double rel_err = 0.0;  // |fd - grad|_inf / |grad|_inf
  // Some direction changed its active set or finiteness inside the stencil.
  bool active_set_changed = false;
};

FdCheck fd_check(const InequalitySystem& sys, const Vector& x, const GaussianModel& model,
                 const DirectionSet& dirs, double step, const EvalOptions& opts = {});

}  // namespace sphrad
