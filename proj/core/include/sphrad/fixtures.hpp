#pragma once

#include "sphrad/constraints.hpp"

#include <functional>
#include <memory>

namespace sphrad {

// level_as_decision: g(x, z) = <a, z> - x[0], so with z ~ N(0, I) the
// probability is Phi(x). Otherwise x in R^m translates the half-space:
// g(x, z) = <a, z - x> - 1.
std::unique_ptr<InequalitySystem> make_halfspace(Vector a, bool level_as_decision = true);

struct ScalarMap {
  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&)> gradient;
  Index x_dim = 1;
};

// f(x) = x[0].
ScalarMap identity_map();

// g(x, z) = f(x) + ln(1 + (c^T z)^2) / 2: quasi-convex in z, not convex.
std::unique_ptr<InequalitySystem> make_slab(Vector c, ScalarMap f);

// Single constraint g(x, z) = value (< 0): every direction is infinite.
std::unique_ptr<InequalitySystem> make_constant(double value, Index x_dim, Index z_dim);

// g(x, z) = |z - center| - x[0].
std::unique_ptr<InequalitySystem> make_ball_system(Vector center);

// g(x, z) = x[0] - (z_1 + 2)(z_2 + 2) on the domain z_1, z_2 >= -2.
std::unique_ptr<InequalitySystem> make_hyperbolic_system();

// S(x) = closed ball of radius x[0] around center.
std::unique_ptr<ConvexSetOracle> make_ball(Vector center);

// S(x) = {(z_1 + 2)(z_2 + 2) >= x, z_1 >= -2, z_2 >= -2}, x in (0, 4).
std::unique_ptr<ConvexSetOracle> make_hyperbolic_set();

namespace detail {
// Projection of w (shifted so the corner sits at the origin) onto
// {q > 0 : q_1 q_2 >= level}. Throws ProjectionDiverged on failure.
Vector project_onto_hyperbola(double level, const Vector& w);
}  // namespace detail

}  // namespace sphrad
