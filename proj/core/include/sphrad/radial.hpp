#pragma once

#include "sphrad/constraints.hpp"
#include "sphrad/gaussian.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace sphrad {

struct RootOptions {
  double g_tol = 1e-10;
  double d_tol = 1e-10;
  double tie_rel = 1e-7;
  double tie_abs = 1e-9;
  // Radius treated as infinity; 0 means "use the chi truncation radius".
  double r_max = 0.0;
  int max_bracket_doublings = 64;
  int max_bisections = 200;

  void validate() const;
};

// Normal information at the exit point for one active constraint. In
// inequality mode grad_x/grad_z are the constraint gradients; in enlarged
// mode grad_z is the unit residual (z - P(z)) / |z - P(z)| and grad_x is empty.
struct ActiveNormal {
  std::size_t index = 0;
  Vector grad_x;
  Vector grad_z;
};

enum class DirectionKind : std::uint8_t { Finite, Infinite };

struct RadialHit {
  double rho = kInfinity;
  bool finite = false;
  // The ray left the system's domain (ray_limit) before any constraint
  // became active. rho is then the limit and active is empty.
  bool domain_limited = false;
  std::vector<std::size_t> active;
  Vector boundary_point;  // empty when infinite
  std::vector<ActiveNormal> normals;
};

DirectionKind classify_direction(const RadialHit& hit) noexcept;

// Exit radius of mean + r L v from {z : g_i(x, z) <= 0 for all i}. Each h_i(r)
// is bracketed by doubling from r = 1 and refined by bisection to machine
// resolution followed by a verified Newton polish.
RadialHit radial_root_inequality(const InequalitySystem& sys, const Vector& x, const Vector& v,
                                 const GaussianModel& model, const RootOptions& opts = {});

// Same, for the enlarged set S(x) + eps B: root of d(mean + r L v, S(x)) = eps.
RadialHit radial_root_enlarged(const ConvexSetOracle& oracle, const Vector& x, const Vector& v,
                               double eps, const GaussianModel& model,
                               const RootOptions& opts = {});

// Effective truncation radius for the model dimension under opts.
double effective_r_max(const RootOptions& opts, Index dim);

}  // namespace sphrad
