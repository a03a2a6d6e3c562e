#include <doctest.h>

#include "sphrad/chi_law.hpp"
#include "sphrad/energy.hpp"
#include "sphrad/errors.hpp"
#include "sphrad/fixtures.hpp"
#include "sphrad/radial.hpp"

#include <cmath>
#include <random>

using namespace sphrad;

namespace {

Vector random_unit(std::mt19937_64& rng, Index m) {
  std::normal_distribution<double> n;
  Vector v(m);
  for (Index j = 0; j < m; ++j) v(j) = n(rng);
  return v.normalized();
}

Vector scalar(double x) { return Vector::Constant(1, x); }

// g = 0.01 - (z_1 - 1)^2 : sublevel set is two disjoint rays.
class TwoIntervals final : public InequalitySystem {
 public:
  std::size_t num_constraints() const override { return 1; }
  Index x_dim() const override { return 1; }
  Index z_dim() const override { return 2; }
  double value(std::size_t, const Vector&, const Vector& z) const override {
    return 0.01 - (z(0) - 1.0) * (z(0) - 1.0);
  }
  Vector grad_x(std::size_t, const Vector&, const Vector&) const override { return Vector::Zero(1); }
  Vector grad_z(std::size_t, const Vector&, const Vector& z) const override {
    return Vector{{-2.0 * (z(0) - 1.0), 0.0}};
  }
};

}  // namespace

TEST_CASE("halfspace exit radius and classification") {
  auto sys = make_halfspace(Vector::Unit(2, 0));
  const GaussianModel model = standard_model(2);

  const RadialHit hit = radial_root_inequality(*sys, scalar(3.0), Vector::Unit(2, 0), model);
  CHECK(hit.finite);
  CHECK(classify_direction(hit) == DirectionKind::Finite);
  CHECK(hit.rho == doctest::Approx(3.0).epsilon(1e-14));
  REQUIRE(hit.active.size() == 1);
  CHECK(hit.active[0] == 0);
  CHECK(hit.boundary_point(0) == doctest::Approx(3.0));
  REQUIRE(hit.normals.size() == 1);
  CHECK(hit.normals[0].grad_z == Vector::Unit(2, 0));

  const RadialHit side = radial_root_inequality(*sys, scalar(3.0), Vector::Unit(2, 1), model);
  CHECK_FALSE(side.finite);
  CHECK(classify_direction(side) == DirectionKind::Infinite);
  CHECK(std::isinf(side.rho));
  CHECK(side.active.empty());
  CHECK(side.boundary_point.size() == 0);
}

TEST_CASE("exit radius along a skew direction with correlated covariance") {
  Matrix cov(2, 2);
  cov << 2.0, 0.6, 0.6, 1.0;
  const GaussianModel model = build_model(Vector{{0.5, -1.0}}, cov);
  const Vector a = Vector{{1.0, 1.0}}.normalized();
  auto sys = make_halfspace(a);
  std::mt19937_64 rng(1);
  for (int k = 0; k < 50; ++k) {
    const Vector v = random_unit(rng, 2);
    const double slope = a.dot(model.factor() * v);
    const double x = 2.0;
    const RadialHit hit = radial_root_inequality(*sys, scalar(x), v, model);
    if (slope <= 0.0) {
      CHECK_FALSE(hit.finite);
      continue;
    }
    const double expected = (x - a.dot(model.mean())) / slope;
    if (expected >= effective_r_max({}, 2)) continue;
    CHECK(hit.rho == doctest::Approx(expected).epsilon(1e-13));
  }
}

TEST_CASE("hyperbolic inequality fixture: rho = 1.5 along -e1") {
  auto sys = make_hyperbolic_system();
  const RadialHit hit = radial_root_inequality(*sys, scalar(1.0), Vector{{-1.0, 0.0}}, standard_model(2));
  REQUIRE(hit.finite);
  CHECK_FALSE(hit.domain_limited);
  CHECK(std::abs(hit.rho - 1.5) <= 1e-13);
}

TEST_CASE("slab direction orthogonal to c is infinite") {
  auto sys = make_slab(Vector::Unit(2, 0), identity_map());
  const GaussianModel model = standard_model(2);
  const RadialHit hit = radial_root_inequality(*sys, scalar(-1.0), Vector::Unit(2, 1), model);
  CHECK(classify_direction(hit) == DirectionKind::Infinite);
  const RadialHit across = radial_root_inequality(*sys, scalar(-1.0), -Vector::Unit(2, 0), model);
  CHECK(across.rho == doctest::Approx(std::sqrt(std::exp(2.0) - 1.0)).epsilon(1e-13));
}

TEST_CASE("interior violation and non-quasi-convex rays are rejected") {
  auto sys = make_halfspace(Vector::Unit(2, 0));
  CHECK_THROWS_AS(radial_root_inequality(*sys, scalar(-1.0), Vector::Unit(2, 0), standard_model(2)), Error);
  try {
    radial_root_inequality(*sys, scalar(0.0), Vector::Unit(2, 0), standard_model(2));
    FAIL("expected InteriorViolated");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InteriorViolated);
  }

  TwoIntervals bad;
  try {
    radial_root_inequality(bad, scalar(0.0), Vector::Unit(2, 0), standard_model(2));
    FAIL("expected BracketFailure");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::BracketFailure);
  }
}

TEST_CASE("enlarged ball radius is 1 + eps") {
  auto ball = make_ball(Vector::Zero(3));
  const GaussianModel model = standard_model(3);
  std::mt19937_64 rng(2);
  for (int k = 0; k < 100; ++k) {
    const RadialHit hit = radial_root_enlarged(*ball, scalar(1.0), random_unit(rng, 3), 0.5, model);
    REQUIRE(hit.finite);
    CHECK(std::abs(hit.rho - 1.5) <= 1e-13);
    CHECK(hit.normals.at(0).grad_z.norm() == doctest::Approx(1.0));
  }
  CHECK_THROWS_AS(radial_root_enlarged(*ball, scalar(1.0), Vector::Unit(3, 0), 0.0, model), Error);
  CHECK_THROWS_AS(radial_root_enlarged(*ball, scalar(1.0), Vector::Unit(3, 0), -1.0, model), Error);
  const GaussianModel shifted = build_model(Vector::Constant(3, 5.0), Matrix::Identity(3, 3));
  try {
    radial_root_enlarged(*ball, scalar(1.0), Vector::Unit(3, 0), 0.5, shifted);
    FAIL("expected InteriorViolated");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InteriorViolated);
  }
}

TEST_CASE("enlarged radius is monotone in eps and dominates the plain radius") {
  auto set = make_hyperbolic_set();
  auto sys = make_hyperbolic_system();
  const GaussianModel model = standard_model(2);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ux(0.3, 3.5);
  for (int k = 0; k < 100; ++k) {
    const Vector x = scalar(ux(rng));
    const Vector v = random_unit(rng, 2);
    const RadialHit h0 = radial_root_inequality(*sys, x, v, model);
    const RadialHit h1 = radial_root_enlarged(*set, x, v, 0.05, model);
    const RadialHit h2 = radial_root_enlarged(*set, x, v, 0.2, model);
    CHECK(h1.rho <= h2.rho);
    CHECK(h0.rho <= h1.rho);
  }
}

TEST_CASE("enlarged hyperbolic radius converges to 1.5 as eps shrinks") {
  auto set = make_hyperbolic_set();
  const GaussianModel model = standard_model(2);
  double prev_gap = kInfinity;
  for (double eps : {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6}) {
    const RadialHit hit = radial_root_enlarged(*set, scalar(1.0), Vector{{-1.0, 0.0}}, eps, model);
    const double gap = hit.rho - 1.5;
    CHECK(gap > 0.0);
    CHECK(gap <= 10.0 * eps);
    CHECK(gap < prev_gap);
    prev_gap = gap;
  }
}

TEST_CASE("radial function is continuous in x") {
  const GaussianModel m2 = standard_model(2);
  std::mt19937_64 rng(4);
  struct Fx {
    std::unique_ptr<InequalitySystem> sys;
    Vector x;
  };
  std::vector<Fx> fixtures;
  fixtures.push_back({make_halfspace(Vector::Unit(2, 0)), scalar(1.0)});
  fixtures.push_back({make_slab(Vector{{0.6, 0.8}}, identity_map()), scalar(-1.0)});
  fixtures.push_back({make_ball_system(Vector{{0.2, 0.1}}), scalar(1.5)});
  fixtures.push_back({make_hyperbolic_system(), scalar(1.0)});
  for (const auto& fx : fixtures) {
    for (int k = 0; k < 20; ++k) {
      const Vector v = random_unit(rng, 2);
      const RadialHit base = radial_root_inequality(*fx.sys, fx.x, v, m2);
      double prev = kInfinity;
      for (double delta : {1e-2, 1e-4, 1e-6}) {
        const RadialHit moved = radial_root_inequality(*fx.sys, fx.x + scalar(delta), v, m2);
        CHECK(base.finite == moved.finite);
        if (!base.finite) continue;
        const double gap = std::abs(moved.rho - base.rho);
        CHECK(gap <= prev);
        prev = gap;
      }
      if (base.finite) CHECK(prev <= 1e-4);
    }
  }
}

TEST_CASE("finite hits satisfy the residual and tie-band invariants") {
  const EnergyParams params;
  auto energy = make_energy_system(params);
  const GaussianModel em = build_energy_covariance(params);
  Vector x(8);
  x << 1.0, 1.2, 1.4, 1.6, 11.5, 11.0, 11.0, 11.0;
  auto hyper = make_hyperbolic_system();
  std::mt19937_64 rng(5);
  const RootOptions opts;
  int checked = 0;
  for (int k = 0; k < 300; ++k) {
    const Vector v = random_unit(rng, 8);
    const RadialHit hit = radial_root_inequality(*energy, x, v, em, opts);
    if (!hit.finite || hit.domain_limited) continue;
    ++checked;
    REQUIRE_FALSE(hit.active.empty());
    const Vector z = em.mean() + hit.rho * em.factor() * v;
    for (std::size_t i : hit.active) CHECK(std::abs(energy->value(i, x, z)) <= 10.0 * opts.g_tol);
    for (std::size_t i = 0; i < energy->num_constraints(); ++i) CHECK(energy->value(i, x, z) <= 10.0 * opts.g_tol);
  }
  CHECK(checked > 100);
  for (int k = 0; k < 300; ++k) {
    const Vector v = random_unit(rng, 2);
    const RadialHit hit = radial_root_inequality(*hyper, scalar(1.0), v, standard_model(2), opts);
    if (!hit.finite || hit.domain_limited) continue;
    CHECK(std::abs(hyper->value(0, scalar(1.0), hit.boundary_point)) <= 10.0 * opts.g_tol);
  }
}

TEST_CASE("energy wind positivity caps the ray when no power is scheduled") {
  const EnergyParams params;
  auto sys = make_energy_system(params);
  const GaussianModel model = build_energy_covariance(params);
  Vector x = Vector::Zero(8);
  x.tail(4).setConstant(20.0);
  Vector v = Vector::Zero(8);
  v(0) = -1.0;  // wind speed in period 1 falls
  const RadialHit hit = radial_root_inequality(*sys, x, v, model);
  REQUIRE(hit.finite);
  CHECK(hit.domain_limited);
  CHECK(hit.active.empty());
  CHECK(hit.boundary_point(0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(hit.rho == doctest::Approx(params.mu_wind / std::sqrt(params.var_wind)).epsilon(1e-12));
}

TEST_CASE("truncation radius leaves at most 1e-12 of chi mass") {
  for (int m = 1; m <= 64; ++m) {
    const double r = effective_r_max({}, m);
    CHECK(RadialLaw(m).cdf(r) >= 1.0 - 1e-12);
  }
  RootOptions opts;
  opts.r_max = 4.0;
  CHECK(effective_r_max(opts, 3) == 4.0);
  opts.g_tol = 0.0;
  CHECK_THROWS_AS(opts.validate(), Error);
}
