#pragma once

#include "sphrad/types.hpp"

#include <cstddef>
#include <optional>
#include <string>

namespace sphrad {

// Family g_i(x, z) <= 0, i = 0..s-1, each quasi-convex in z for fixed x.
// Decision x lives in R^n, the random vector z in R^m.
class InequalitySystem {
 public:
  virtual ~InequalitySystem() = default;

  virtual std::size_t num_constraints() const = 0;
  virtual Index x_dim() const = 0;
  virtual Index z_dim() const = 0;

  virtual double value(std::size_t i, const Vector& x, const Vector& z) const = 0;
  virtual Vector grad_x(std::size_t i, const Vector& x, const Vector& z) const = 0;
  virtual Vector grad_z(std::size_t i, const Vector& x, const Vector& z) const = 0;

  // Largest r such that base + r*dir stays inside the region where the system
  // is defined (e.g. positivity of a wind speed). +inf when unrestricted.
  virtual double ray_limit(const Vector& /*x*/, const Vector& /*base*/,
                           const Vector& /*dir*/) const {
    return kInfinity;
  }

  // Closed-form exit radius of constraint i along base + r*dir, if the system
  // knows one (+inf when the ray never leaves the sublevel set). nullopt
  // means the radial solver has to search numerically.
  virtual std::optional<double> exit_radius(std::size_t /*i*/, const Vector& /*x*/,
                                            const Vector& /*base*/,
                                            const Vector& /*dir*/) const {
    return std::nullopt;
  }

  // Throws InteriorViolated unless g_i(x, point) < 0 for every i.
  virtual void check_interior(const Vector& x, const Vector& point) const;
};

// Parametric closed convex body S(x) in R^m accessed through its metric
// projection.
class ConvexSetOracle {
 public:
  virtual ~ConvexSetOracle() = default;

  virtual Index x_dim() const = 0;
  virtual Index z_dim() const = 0;

  virtual Vector project(const Vector& x, const Vector& z) const = 0;
  virtual bool contains(const Vector& x, const Vector& z) const = 0;

  // Gradient in x of u(x,z) = d(z, S(x))^2 / 2 given the projection of z.
  // Oracles that cannot provide it return nullopt.
  virtual std::optional<Vector> half_sq_distance_grad_x(const Vector& /*x*/,
                                                        const Vector& /*z*/,
                                                        const Vector& /*proj*/) const {
    return std::nullopt;
  }

  double distance(const Vector& x, const Vector& z) const { return (z - project(x, z)).norm(); }
};

// Empirical eta-growth check: ratio |grad_x g_i| / |grad_z g_i| at the
// boundary points reached by finite directions.
struct GrowthDiagnostic {
  double max_ratio = 0.0;
  // |z| at the boundary point where max_ratio was attained.
  double argmax_norm = 0.0;
  std::size_t argmax_direction = 0;
  std::size_t points_checked = 0;
  bool all_finite = true;
};

}  // namespace sphrad
