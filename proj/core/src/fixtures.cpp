#include "sphrad/fixtures.hpp"

#include "sphrad/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace sphrad {

namespace {

class Halfspace final : public InequalitySystem {
 public:
  Halfspace(Vector a, bool level_as_decision) : a_(std::move(a)), level_(level_as_decision) {}

  std::size_t num_constraints() const override { return 1; }
  Index x_dim() const override { return level_ ? 1 : a_.size(); }
  Index z_dim() const override { return a_.size(); }

  double value(std::size_t, const Vector& x, const Vector& z) const override {
    return level_ ? a_.dot(z) - x(0) : a_.dot(z - x) - 1.0;
  }
  Vector grad_x(std::size_t, const Vector&, const Vector&) const override {
    return level_ ? Vector::Constant(1, -1.0) : Vector(-a_);
  }
  Vector grad_z(std::size_t, const Vector&, const Vector&) const override { return a_; }

 private:
  Vector a_;
  bool level_;
};

class Slab final : public InequalitySystem {
 public:
  Slab(Vector c, ScalarMap f) : c_(std::move(c)), f_(std::move(f)) {}

  std::size_t num_constraints() const override { return 1; }
  Index x_dim() const override { return f_.x_dim; }
  Index z_dim() const override { return c_.size(); }

  double value(std::size_t, const Vector& x, const Vector& z) const override {
    const double t = c_.dot(z);
    return f_.value(x) + 0.5 * std::log1p(t * t);
  }
  Vector grad_x(std::size_t, const Vector& x, const Vector&) const override { return f_.gradient(x); }
  Vector grad_z(std::size_t, const Vector&, const Vector& z) const override {
    const double t = c_.dot(z);
    return (t / (1.0 + t * t)) * c_;
  }

  void check_interior(const Vector& x, const Vector& point) const override {
    const double fx = f_.value(x);
    if (!(fx < 0.0)) {
      fail(ErrorCode::InteriorViolated, "slab level f(x) = " + std::to_string(fx) + " must be negative");
    }
    InequalitySystem::check_interior(x, point);
  }

 private:
  Vector c_;
  ScalarMap f_;
};

class Constant final : public InequalitySystem {
 public:
  Constant(double value, Index n, Index m) : value_(value), n_(n), m_(m) {}

  std::size_t num_constraints() const override { return 1; }
  Index x_dim() const override { return n_; }
  Index z_dim() const override { return m_; }
  double value(std::size_t, const Vector&, const Vector&) const override { return value_; }
  Vector grad_x(std::size_t, const Vector&, const Vector&) const override { return Vector::Zero(n_); }
  Vector grad_z(std::size_t, const Vector&, const Vector&) const override { return Vector::Zero(m_); }
  std::optional<double> exit_radius(std::size_t, const Vector&, const Vector&,
                                    const Vector&) const override {
    return kInfinity;
  }

 private:
  double value_;
  Index n_;
  Index m_;
};

class BallSystem final : public InequalitySystem {
 public:
  explicit BallSystem(Vector center) : center_(std::move(center)) {}

  std::size_t num_constraints() const override { return 1; }
  Index x_dim() const override { return 1; }
  Index z_dim() const override { return center_.size(); }
  double value(std::size_t, const Vector& x, const Vector& z) const override {
    return (z - center_).norm() - x(0);
  }
  Vector grad_x(std::size_t, const Vector&, const Vector&) const override {
    return Vector::Constant(1, -1.0);
  }
  Vector grad_z(std::size_t, const Vector&, const Vector& z) const override {
    const Vector diff = z - center_;
    const double norm = diff.norm();
    return norm > 0.0 ? Vector(diff / norm) : Vector::Zero(diff.size());
  }

 private:
  Vector center_;
};

constexpr double kCorner = -2.0;

class HyperbolicSystem final : public InequalitySystem {
 public:
  std::size_t num_constraints() const override { return 1; }
  Index x_dim() const override { return 1; }
  Index z_dim() const override { return 2; }

  double value(std::size_t, const Vector& x, const Vector& z) const override {
    return x(0) - (z(0) - kCorner) * (z(1) - kCorner);
  }
  Vector grad_x(std::size_t, const Vector&, const Vector&) const override {
    return Vector::Constant(1, 1.0);
  }
  Vector grad_z(std::size_t, const Vector&, const Vector& z) const override {
    return Vector{{-(z(1) - kCorner), -(z(0) - kCorner)}};
  }

  double ray_limit(const Vector&, const Vector& base, const Vector& dir) const override {
    double limit = kInfinity;
    for (Index j = 0; j < 2; ++j) {
      if (dir(j) < 0.0) limit = std::min(limit, (base(j) - kCorner) / -dir(j));
    }
    return limit;
  }

  void check_interior(const Vector& x, const Vector& point) const override {
    if (!(point(0) > kCorner && point(1) > kCorner)) {
      fail(ErrorCode::InteriorViolated, "mean lies outside the quadrant z >= -2");
    }
    InequalitySystem::check_interior(x, point);
  }
};

class BallOracle final : public ConvexSetOracle {
 public:
  explicit BallOracle(Vector center) : center_(std::move(center)) {}

  Index x_dim() const override { return 1; }
  Index z_dim() const override { return center_.size(); }

  Vector project(const Vector& x, const Vector& z) const override {
    const Vector diff = z - center_;
    const double norm = diff.norm();
    if (norm <= x(0)) return z;
    return center_ + (x(0) / norm) * diff;
  }
  bool contains(const Vector& x, const Vector& z) const override {
    return (z - center_).norm() <= x(0);
  }
  std::optional<Vector> half_sq_distance_grad_x(const Vector& x, const Vector& z,
                                                const Vector&) const override {
    const double d = std::max((z - center_).norm() - x(0), 0.0);
    return Vector::Constant(1, -d);
  }

 private:
  Vector center_;
};

class HyperbolicOracle final : public ConvexSetOracle {
 public:
  Index x_dim() const override { return 1; }
  Index z_dim() const override { return 2; }

  Vector project(const Vector& x, const Vector& z) const override {
    const Vector shift = Vector::Constant(2, kCorner);
    return detail::project_onto_hyperbola(level(x), z - shift) + shift;
  }
  bool contains(const Vector& x, const Vector& z) const override {
    const double a = z(0) - kCorner;
    const double b = z(1) - kCorner;
    return a >= 0.0 && b >= 0.0 && a * b >= level(x);
  }
  // d(d^2/2)/dx is the KKT multiplier: |P(z) - z| / |(q_2, q_1)|.
  std::optional<Vector> half_sq_distance_grad_x(const Vector&, const Vector& z,
                                                const Vector& proj) const override {
    const double dist = (z - proj).norm();
    const double q1 = proj(0) - kCorner;
    const double q2 = proj(1) - kCorner;
    return Vector::Constant(1, dist / std::hypot(q1, q2));
  }

 private:
  static double level(const Vector& x) {
    const double level = x(0);
    require(level > 0.0, "hyperbolic set needs x > 0");
    return level;
  }
};

}  // namespace

namespace detail {

Vector project_onto_hyperbola(double level, const Vector& w) {
  if (w(0) > 0.0 && w(1) > 0.0 && w(0) * w(1) >= level) return w;

  // Stationarity of |(t, level/t) - w|^2 in t > 0, multiplied through by t^3.
  // For w outside the set the positive root is unique.
  const double w1 = w(0);
  const double w2 = w(1);
  auto eval = [&](double t, double& slope) {
    slope = ((4.0 * t - 3.0 * w1) * t) * t + level * w2;
    return ((t - w1) * t * t) * t + level * w2 * t - level * level;
  };

  double lo = 0.0;
  double hi = std::max({1.0, std::abs(w1), std::sqrt(level)});
  double slope = 0.0;
  int grow = 0;
  while (eval(hi, slope) <= 0.0) {
    lo = hi;
    hi *= 2.0;
    if (++grow > 200) fail(ErrorCode::ProjectionDiverged, "no bracket for hyperbola projection");
  }

  double t = std::clamp(std::max(w1, std::sqrt(level)), lo, hi);
  if (!(t > lo && t < hi)) t = 0.5 * (lo + hi);
  constexpr int kMaxNewton = 200;
  constexpr int kMaxFallback = 50;
  int fallback = 0;
  bool converged = false;
  for (int it = 0; it < kMaxNewton; ++it) {
    const double g = eval(t, slope);
    if (g == 0.0) {
      converged = true;
      break;
    }
    (g < 0.0 ? lo : hi) = t;
    const double step = slope > 0.0 ? g / slope : kInfinity;
    if (std::abs(step) <= 4.0 * std::numeric_limits<double>::epsilon() * t) {
      converged = true;
      break;
    }
    double next = t - step;
    if (!(next > lo && next < hi)) {
      // Newton left the bracket: bisect instead.
      next = 0.5 * (lo + hi);
      if (++fallback > kMaxFallback) break;
    }
    const bool done = std::abs(next - t) <= 4.0 * std::numeric_limits<double>::epsilon() * t;
    t = next;
    if (done || hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) {
      converged = true;
      break;
    }
  }
  if (!converged) fail(ErrorCode::ProjectionDiverged, "hyperbola projection did not converge");
  return Vector{{t, level / t}};
}

}  // namespace detail

std::unique_ptr<InequalitySystem> make_halfspace(Vector a, bool level_as_decision) {
  require(a.size() >= 1, "half-space normal must be non-empty");
  require(std::abs(a.norm() - 1.0) <= 1e-12, "half-space normal must have unit norm");
  return std::make_unique<Halfspace>(std::move(a), level_as_decision);
}

ScalarMap identity_map() {
  return ScalarMap{[](const Vector& x) { return x(0); },
                   [](const Vector&) { return Vector::Constant(1, 1.0); }, 1};
}

std::unique_ptr<InequalitySystem> make_slab(Vector c, ScalarMap f) {
  require(c.size() >= 1 && c.norm() > 0.0, "slab direction must be nonzero");
  require(static_cast<bool>(f.value) && static_cast<bool>(f.gradient), "slab level map incomplete");
  return std::make_unique<Slab>(std::move(c), std::move(f));
}

std::unique_ptr<InequalitySystem> make_constant(double value, Index x_dim, Index z_dim) {
  require(value < 0.0, "constant constraint must be strictly negative");
  return std::make_unique<Constant>(value, x_dim, z_dim);
}

std::unique_ptr<InequalitySystem> make_ball_system(Vector center) {
  return std::make_unique<BallSystem>(std::move(center));
}

std::unique_ptr<InequalitySystem> make_hyperbolic_system() { return std::make_unique<HyperbolicSystem>(); }

std::unique_ptr<ConvexSetOracle> make_ball(Vector center) {
  return std::make_unique<BallOracle>(std::move(center));
}

std::unique_ptr<ConvexSetOracle> make_hyperbolic_set() { return std::make_unique<HyperbolicOracle>(); }

}  // namespace sphrad
