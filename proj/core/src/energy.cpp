#include "sphrad/energy.hpp"

#include "sphrad/errors.hpp"

#include <cmath>
#include <cstdlib>
#include <string>

namespace sphrad {

void EnergyParams::validate() const {
  require(periods >= 1, "energy: periods must be >= 1");
  require(wind_coeff > 0.0, "energy: wind coefficient must be positive");
  require(mu_wind > 0.0, "energy: mean wind speed must be positive");
  require(std::abs(rho_wind) < 1.0 && std::abs(rho_load) < 1.0 && std::abs(rho_cross) < 1.0,
          "energy: correlations must lie in (-1, 1)");
  require(var_wind > 0.0 && var_load > 0.0, "energy: variances must be positive");
  require(wind_lower <= wind_upper && gen_lower <= gen_upper, "energy: empty decision box");
  require(p_level > 0.0 && p_level < 1.0, "energy: probability level must lie in (0, 1)");
}

Vector EnergyParams::mean() const {
  Vector mu(2 * periods);
  mu.head(periods).setConstant(mu_wind);
  mu.tail(periods).setConstant(mu_load);
  return mu;
}

Vector EnergyParams::cost() const {
  Vector c = Vector::Zero(2 * periods);
  c.tail(periods).setConstant(cost_gen);
  return c;
}

Vector EnergyParams::lower() const {
  Vector l(2 * periods);
  l.head(periods).setConstant(wind_lower);
  l.tail(periods).setConstant(gen_lower);
  return l;
}

Vector EnergyParams::upper() const {
  Vector u(2 * periods);
  u.head(periods).setConstant(wind_upper);
  u.tail(periods).setConstant(gen_upper);
  return u;
}

Matrix energy_covariance(const EnergyParams& params) {
  params.validate();
  const int T = params.periods;
  Matrix corr(2 * T, 2 * T);
  for (int i = 0; i < T; ++i) {
    for (int j = 0; j < T; ++j) {
      const int lag = std::abs(i - j);
      const double c11 = std::pow(params.rho_wind, lag);
      const double c22 = std::pow(params.rho_load, lag);
      corr(i, j) = c11;
      corr(T + i, T + j) = c22;
      corr(i, T + j) = params.rho_cross * c11 * c22;
      corr(T + j, i) = corr(i, T + j);
    }
  }
  Vector sd(2 * T);
  sd.head(T).setConstant(std::sqrt(params.var_wind));
  sd.tail(T).setConstant(std::sqrt(params.var_load));
  return sd.asDiagonal() * corr * sd.asDiagonal();
}

GaussianModel build_energy_covariance(const EnergyParams& params) {
  return build_model(params.mean(), energy_covariance(params));
}

namespace {

class EnergySystem final : public InequalitySystem {
 public:
  explicit EnergySystem(const EnergyParams& params)
      : periods_(params.periods), coeff_(params.wind_coeff) {}

  std::size_t num_constraints() const override { return static_cast<std::size_t>(2 * periods_); }
  Index x_dim() const override { return 2 * periods_; }
  Index z_dim() const override { return 2 * periods_; }

  double value(std::size_t i, const Vector& x, const Vector& z) const override {
    const Index t = period(i);
    if (is_wind(i)) return x(t) - coeff_ * z(t) * z(t) * z(t);
    return z(periods_ + t) - x(t) - x(periods_ + t);
  }

  Vector grad_x(std::size_t i, const Vector&, const Vector&) const override {
    const Index t = period(i);
    Vector g = Vector::Zero(2 * periods_);
    if (is_wind(i)) {
      g(t) = 1.0;
    } else {
      g(t) = -1.0;
      g(periods_ + t) = -1.0;
    }
    return g;
  }

  Vector grad_z(std::size_t i, const Vector&, const Vector& z) const override {
    const Index t = period(i);
    Vector g = Vector::Zero(2 * periods_);
    if (is_wind(i)) {
      g(t) = -3.0 * coeff_ * z(t) * z(t);
    } else {
      g(periods_ + t) = 1.0;
    }
    return g;
  }

  // Wind speeds must stay nonnegative.
  double ray_limit(const Vector&, const Vector& base, const Vector& dir) const override {
    double limit = kInfinity;
    for (Index t = 0; t < periods_; ++t) {
      if (dir(t) < 0.0) limit = std::min(limit, base(t) / -dir(t));
    }
    return limit;
  }

  std::optional<double> exit_radius(std::size_t i, const Vector& x, const Vector& base,
                                    const Vector& dir) const override {
    const Index t = period(i);
    if (is_wind(i)) {
      // p <= c z^3  <=>  z >= cbrt(p / c)
      const double d = dir(t);
      if (d >= 0.0) return kInfinity;
      return (base(t) - std::cbrt(x(t) / coeff_)) / -d;
    }
    const double d = dir(periods_ + t);
    if (d <= 0.0) return kInfinity;
    return (x(t) + x(periods_ + t) - base(periods_ + t)) / d;
  }

  void check_interior(const Vector& x, const Vector& point) const override {
    for (Index t = 0; t < periods_; ++t) {
      if (!(point(t) > 0.0)) {
        fail(ErrorCode::InteriorViolated, "period " + std::to_string(t + 1) + ": mean wind speed not positive");
      }
    }
    for (std::size_t i = 0; i < num_constraints(); ++i) {
      const double g = value(i, x, point);
      if (!(g < 0.0)) {
        fail(ErrorCode::InteriorViolated,
             std::string(is_wind(i) ? "wind" : "load") + " constraint of period " +
                 std::to_string(period(i) + 1) + " violated at the mean (g = " + std::to_string(g) + ")");
      }
    }
  }

 private:
  bool is_wind(std::size_t i) const { return static_cast<Index>(i) < periods_; }
  Index period(std::size_t i) const { return static_cast<Index>(i) % periods_; }

  Index periods_;
  double coeff_;
};

}  // namespace

std::unique_ptr<InequalitySystem> make_energy_system(const EnergyParams& params) {
  params.validate();
  return std::make_unique<EnergySystem>(params);
}

}  // namespace sphrad
