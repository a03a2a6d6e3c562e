#include <doctest.h>

#include "oracles.hpp"
#include "sphrad/energy.hpp"
#include "sphrad/errors.hpp"
#include "sphrad/fixtures.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <memory>
#include <random>
#include <string>
#include <vector>

using namespace sphrad;
namespace oracle = sphrad::testing;

namespace {

struct Case {
  std::string name;
  std::shared_ptr<InequalitySystem> sys;
  std::function<Vector(std::mt19937_64&)> sample_x;
  std::function<Vector(std::mt19937_64&)> sample_z;
};

std::vector<Case> fixture_cases() {
  std::vector<Case> cases;
  auto normal = [](Index m) {
    return [m](std::mt19937_64& rng) {
      std::normal_distribution<double> n;
      Vector z(m);
      for (Index j = 0; j < m; ++j) z(j) = n(rng);
      return z;
    };
  };
  auto uniform = [](double lo, double hi, Index n) {
    return [=](std::mt19937_64& rng) {
      std::uniform_real_distribution<double> u(lo, hi);
      Vector x(n);
      for (Index j = 0; j < n; ++j) x(j) = u(rng);
      return x;
    };
  };
  Vector a = Vector::Ones(3).normalized();
  cases.push_back({"halfspace", make_halfspace(a), uniform(0.2, 3.0, 1), normal(3)});
  cases.push_back({"halfspace-shift", make_halfspace(a, false), uniform(-0.5, 0.5, 3), normal(3)});
  cases.push_back({"slab", make_slab(Vector{{1.0, -2.0}}, identity_map()), uniform(-2.0, -0.2, 1), normal(2)});
  cases.push_back({"ball", make_ball_system(Vector::Zero(2)), uniform(0.5, 2.0, 1), normal(2)});
  cases.push_back({"hyperbolic", make_hyperbolic_system(), uniform(0.5, 3.0, 1),
                   [](std::mt19937_64& rng) {
                     std::uniform_real_distribution<double> u(-1.9, 3.0);
                     return Vector{{u(rng), u(rng)}};
                   }});
  EnergyParams params;
  cases.push_back({"energy", make_energy_system(params),
                   [](std::mt19937_64& rng) {
                     std::uniform_real_distribution<double> w(0.1, 2.0);
                     std::uniform_real_distribution<double> g(5.0, 15.0);
                     Vector x(8);
                     for (int t = 0; t < 4; ++t) {
                       x(t) = w(rng);
                       x(4 + t) = g(rng);
                     }
                     return x;
                   },
                   [](std::mt19937_64& rng) {
                     std::uniform_real_distribution<double> w(0.2, 8.0);
                     std::normal_distribution<double> l(10.0, 1.0);
                     Vector z(8);
                     for (int t = 0; t < 4; ++t) {
                       z(t) = w(rng);
                       z(4 + t) = l(rng);
                     }
                     return z;
                   }});
  return cases;
}

double rel_gap(const Vector& a, const Vector& b) {
  return (a - b).cwiseAbs().maxCoeff() / std::max(1.0, b.cwiseAbs().maxCoeff());
}

}  // namespace

TEST_CASE("halfspace fixture evaluates linearly") {
  auto sys = make_halfspace(Vector::Unit(2, 0));
  const Vector x = Vector::Constant(1, 1.0);
  CHECK(sys->value(0, x, Vector{{0.5, 17.0}}) == doctest::Approx(-0.5));
  CHECK(sys->grad_z(0, x, Vector{{3.0, 1.0}}) == Vector::Unit(2, 0));
  CHECK(sys->grad_x(0, x, Vector::Zero(2))(0) == -1.0);
  CHECK_THROWS_AS(make_halfspace(Vector{{1.0, 1.0}}), Error);
}

TEST_CASE("slab fixture matches its closed forms") {
  const Vector c{{1.0, 0.0}};
  auto sys = make_slab(c, identity_map());
  const Vector x = Vector::Constant(1, -1.0);
  CHECK(sys->value(0, x, Vector{{0.0, 5.0}}) == doctest::Approx(-1.0));

  const Vector z{{0.7, -0.3}};
  const double t = c.dot(z);
  CHECK(rel_gap(sys->grad_z(0, x, z), (t / (1.0 + t * t)) * c) == 0.0);

  const double tau = std::sqrt(std::exp(2.0) - 1.0);
  CHECK(tau == doctest::Approx(2.5276582).epsilon(1e-6));
  CHECK(std::abs(sys->value(0, x, Vector{{tau, 0.0}})) <= 1e-14);

  CHECK_THROWS_AS(sys->check_interior(Vector::Constant(1, 0.0), Vector::Zero(2)), Error);
}

TEST_CASE("constraint gradients agree with central differences") {
  std::mt19937_64 rng(7);
  for (const auto& fx : fixture_cases()) {
    for (int trial = 0; trial < 20; ++trial) {
      const Vector x = fx.sample_x(rng);
      const Vector z = fx.sample_z(rng);
      for (std::size_t i = 0; i < fx.sys->num_constraints(); ++i) {
        Vector fd_x(x.size());
        for (Index j = 0; j < x.size(); ++j) {
          const double h = 1e-6 * std::max(1.0, std::abs(x(j)));
          Vector xp = x, xm = x;
          xp(j) += h;
          xm(j) -= h;
          fd_x(j) = (fx.sys->value(i, xp, z) - fx.sys->value(i, xm, z)) / (2.0 * h);
        }
        Vector fd_z(z.size());
        for (Index j = 0; j < z.size(); ++j) {
          const double h = 1e-6 * std::max(1.0, std::abs(z(j)));
          Vector zp = z, zm = z;
          zp(j) += h;
          zm(j) -= h;
          fd_z(j) = (fx.sys->value(i, x, zp) - fx.sys->value(i, x, zm)) / (2.0 * h);
        }
        CHECK_MESSAGE(rel_gap(fd_x, fx.sys->grad_x(i, x, z)) <= 1e-6, fx.name);
        CHECK_MESSAGE(rel_gap(fd_z, fx.sys->grad_z(i, x, z)) <= 1e-6, fx.name);
      }
    }
  }
}

TEST_CASE("fixtures are quasi-convex in z") {
  std::mt19937_64 rng(11);
  for (const auto& fx : fixture_cases()) {
    int failures = 0;
    for (int trial = 0; trial < 1000; ++trial) {
      const Vector x = fx.sample_x(rng);
      const Vector z1 = fx.sample_z(rng);
      const Vector z2 = fx.sample_z(rng);
      const Vector mid = 0.5 * (z1 + z2);
      for (std::size_t i = 0; i < fx.sys->num_constraints(); ++i) {
        const double lhs = fx.sys->value(i, x, mid);
        const double rhs = std::max(fx.sys->value(i, x, z1), fx.sys->value(i, x, z2));
        if (lhs > rhs + 1e-9) ++failures;
      }
    }
    CHECK_MESSAGE(failures == 0, fx.name);
  }
}

TEST_CASE("hyperbolic projection examples") {
  auto set = make_hyperbolic_set();
  const Vector x = Vector::Constant(1, 1.0);
  CHECK(set->project(x, Vector::Zero(2)) == Vector::Zero(2));

  const Vector p = set->project(x, Vector{{-2.0, -2.0}});
  CHECK(std::abs(p(0) + 1.0) <= 1e-10);
  CHECK(std::abs(p(1) + 1.0) <= 1e-10);
  const Eigen::Vector2d grid = oracle::hyperbola_grid_projection(1.0, Eigen::Vector2d(0.0, 0.0)) -
                               Eigen::Vector2d(2.0, 2.0);
  CHECK((p - Vector(grid)).norm() <= 1e-8);
}

TEST_CASE("hyperbolic projection matches a grid-search oracle") {
  auto set = make_hyperbolic_set();
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-6.0, 3.0);
  std::uniform_real_distribution<double> ux(0.3, 3.5);
  int checked = 0;
  while (checked < 40) {
    const Vector x = Vector::Constant(1, ux(rng));
    const Vector z{{u(rng), u(rng)}};
    if (set->contains(x, z)) continue;
    ++checked;
    const Vector p = set->project(x, z);
    const Eigen::Vector2d w(z(0) + 2.0, z(1) + 2.0);
    const Eigen::Vector2d q = oracle::hyperbola_grid_projection(x(0), w);
    CHECK((p - Vector(q - Eigen::Vector2d(2.0, 2.0))).norm() <= 1e-7);
  }
}

TEST_CASE("hyperbolic projection of distant points") {
  auto set = make_hyperbolic_set();
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-30.0, 30.0);
  std::uniform_real_distribution<double> ux(0.3, 3.5);
  const std::vector<std::pair<double, Vector>> known{
      {0.30652816648507158, Vector{{-24.580043133994668, -1.9154236845985189}}},
      {2.2495715825052747, Vector{{-22.758096766140305, -16.739874004760757}}}};
  for (const auto& [level, z] : known) {
    const Vector p = set->project(Vector::Constant(1, level), z);
    const Eigen::Vector2d q = oracle::hyperbola_grid_projection(level, Eigen::Vector2d(z(0) + 2.0, z(1) + 2.0));
    CHECK((p - Vector(q - Eigen::Vector2d(2.0, 2.0))).norm() <= 1e-7);
  }
  for (int k = 0; k < 2000; ++k) {
    const Vector x = Vector::Constant(1, ux(rng));
    const Vector z{{u(rng), u(rng)}};
    Vector p;
    REQUIRE_NOTHROW(p = set->project(x, z));
    CHECK(set->distance(x, z) <= (z - Vector{{-2.0 + std::sqrt(x(0)), -2.0 + std::sqrt(x(0))}}).norm() + 1e-9);
  }
}

TEST_CASE("hyperbolic boundary normal is parallel to (z2+2, z1+2)") {
  auto set = make_hyperbolic_set();
  const Vector x = Vector::Constant(1, 1.0);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-5.0, 1.0);
  for (int k = 0; k < 50; ++k) {
    const Vector z{{u(rng), u(rng)}};
    if (set->contains(x, z)) continue;
    const Vector p = set->project(x, z);
    const Vector r = z - p;
    const Vector normal{{p(1) + 2.0, p(0) + 2.0}};
    const double cross = r(0) * normal(1) - r(1) * normal(0);
    CHECK(std::abs(cross) <= 1e-9 * r.norm() * normal.norm());
    CHECK(r.dot(normal) <= 0.0);  // outward normal is -(z2+2, z1+2)
    CHECK(std::abs((p(0) + 2.0) * (p(1) + 2.0) - 1.0) <= 1e-10);
  }
}

TEST_CASE("projection oracles are idempotent, variational and nonexpansive") {
  std::vector<std::pair<std::string, std::unique_ptr<ConvexSetOracle>>> oracles;
  oracles.emplace_back("ball", make_ball(Vector{{0.3, -0.2}}));
  oracles.emplace_back("hyperbolic", make_hyperbolic_set());
  std::mt19937_64 rng(17);
  std::normal_distribution<double> n(0.0, 2.5);
  std::uniform_real_distribution<double> ux(0.5, 2.0);
  for (const auto& [name, set] : oracles) {
    for (int k = 0; k < 500; ++k) {
      const Vector x = Vector::Constant(1, ux(rng));
      const Vector z{{n(rng), n(rng)}};
      const Vector z2{{n(rng), n(rng)}};
      const Vector p = set->project(x, z);
      CHECK_MESSAGE((set->project(x, p) - p).norm() <= 1e-9, name);
      CHECK_MESSAGE((p - set->project(x, z2)).norm() <= (z - z2).norm() + 1e-9, name);
      // Sample w in S(x) by projecting a random point.
      const Vector w = set->project(x, Vector{{n(rng), n(rng)}});
      CHECK_MESSAGE((z - p).dot(w - p) <= 1e-9 * (1.0 + (z - p).norm() * (w - p).norm()), name);
    }
  }
}

TEST_CASE("hyperbolic set is transversal at the mean") {
  auto set = make_hyperbolic_set();
  const Vector x = Vector::Constant(1, 1.0);
  std::mt19937_64 rng(23);
  std::normal_distribution<double> n(0.0, 3.0);
  double worst = kInfinity;
  int sampled = 0;
  while (sampled < 500) {
    const Vector z{{n(rng), n(rng)}};
    if (set->contains(x, z)) continue;
    ++sampled;
    const Vector p = set->project(x, z);
    const double d = (z - p).norm();
    worst = std::min(worst, (z - p).dot(z) / d);
  }
  MESSAGE("empirical transversality constant r = " << worst);
  CHECK(worst > 0.0);
}

TEST_CASE("hyperbolic sensitivity equals the KKT multiplier") {
  auto set = make_hyperbolic_set();
  const Vector z{{-2.5, 0.5}};
  const double h = 1e-6;
  auto half_sq = [&](double level) {
    const Vector xl = Vector::Constant(1, level);
    return 0.5 * std::pow(set->distance(xl, z), 2);
  };
  const double fd = (half_sq(1.0 + h) - half_sq(1.0 - h)) / (2.0 * h);
  const Vector x = Vector::Constant(1, 1.0);
  const auto sens = set->half_sq_distance_grad_x(x, z, set->project(x, z));
  REQUIRE(sens.has_value());
  CHECK((*sens)(0) == doctest::Approx(fd).epsilon(1e-6));
}

TEST_CASE("energy system constants and interior") {
  const EnergyParams params;
  auto sys = make_energy_system(params);
  CHECK(params.wind_coeff * std::pow(params.mu_wind, 3) == doctest::Approx(2.4220).epsilon(1e-4));

  Vector x = Vector::Zero(8);
  x.tail(4).setConstant(20.0);
  const Vector mean = params.mean();
  for (std::size_t t = 0; t < 4; ++t) CHECK(sys->value(4 + t, x, mean) == doctest::Approx(-10.0));
  CHECK_NOTHROW(sys->check_interior(x, mean));

  const Vector gx = sys->grad_x(5, x, mean);
  Vector expected = Vector::Zero(8);
  expected(1) = -1.0;
  expected(5) = -1.0;
  CHECK(gx == expected);

  x(2) = 2.5;  // above c * mu^3
  try {
    sys->check_interior(x, mean);
    FAIL("expected InteriorViolated");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InteriorViolated);
    CHECK(std::string(e.what()).find("period 3") != std::string::npos);
  }
}

TEST_CASE("energy closed-form exit radii agree with the constraint values") {
  const EnergyParams params;
  auto sys = make_energy_system(params);
  const GaussianModel model = build_energy_covariance(params);
  std::mt19937_64 rng(29);
  std::normal_distribution<double> n;
  Vector x(8);
  x << 0.5, 1.0, 1.5, 2.0, 12.0, 13.0, 14.0, 15.0;
  REQUIRE_NOTHROW(sys->check_interior(x, model.mean()));
  for (int k = 0; k < 200; ++k) {
    Vector v(8);
    for (int j = 0; j < 8; ++j) v(j) = n(rng);
    v.normalize();
    const Vector dir = model.factor() * v;
    for (std::size_t i = 0; i < 8; ++i) {
      const double r = *sys->exit_radius(i, x, model.mean(), dir);
      if (std::isinf(r)) continue;
      CHECK(r > 0.0);
      CHECK(std::abs(sys->value(i, x, model.mean() + r * dir)) <= 1e-10);
    }
  }
}

TEST_CASE("energy covariance assembly") {
  EnergyParams one;
  one.periods = 1;
  const Matrix c1 = energy_covariance(one);
  const double off = -0.3 * std::sqrt(1.54);
  CHECK(c1(0, 0) == doctest::Approx(1.54));
  CHECK(c1(1, 1) == doctest::Approx(1.0));
  CHECK(c1(0, 1) == doctest::Approx(off));
  CHECK(c1(1, 0) == doctest::Approx(off));

  const EnergyParams four;
  const Matrix c4 = energy_covariance(four);
  Vector diag(8);
  diag << 1.54, 1.54, 1.54, 1.54, 1.0, 1.0, 1.0, 1.0;
  CHECK((c4.diagonal() - diag).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK((c4 - c4.transpose()).cwiseAbs().maxCoeff() == 0.0);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(c4);
  CHECK(eig.eigenvalues().minCoeff() > 0.0);
  CHECK(c4(1, 6) == doctest::Approx(-0.3 * 0.96 * 0.8 * std::sqrt(1.54)));
  CHECK_NOTHROW(build_energy_covariance(four));

  EnergyParams bad;
  bad.rho_cross = -0.99;
  bad.rho_wind = 0.1;
  bad.rho_load = 0.1;
  Eigen::SelfAdjointEigenSolver<Matrix> eig_bad(energy_covariance(bad));
  if (eig_bad.eigenvalues().minCoeff() <= 0.0) {
    CHECK_THROWS_AS(build_energy_covariance(bad), Error);
  }
}
