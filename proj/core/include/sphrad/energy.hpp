#pragma once

#include "sphrad/constraints.hpp"
#include "sphrad/gaussian.hpp"

#include <memory>

namespace sphrad {

// Wind/load dispatch instance. Decision x = (p^w_1..p^w_T, p^g_1..p^g_T);
// random vector z = (wind speed_1..T, load_1..T).
struct EnergyParams {
  int periods = 4;
  double wind_coeff = 0.032;
  double mu_wind = 4.23;
  double mu_load = 10.0;
  double rho_wind = 0.96;
  double rho_load = 0.8;
  double rho_cross = -0.3;
  double var_wind = 1.54;
  double var_load = 1.0;
  double cost_gen = 5.0;
  double wind_lower = 0.0;
  double wind_upper = 8.0;
  double gen_lower = 0.0;
  double gen_upper = 20.0;
  double p_level = 0.8;

  void validate() const;
  Vector mean() const;
  Vector cost() const;
  Vector lower() const;
  Vector upper() const;
  Index x_dim() const { return 2 * periods; }
};

// Correlation blocks C11 = rho_wind^|i-j|, C22 = rho_load^|i-j| and
// C12 = rho_cross * C11 .* C22, scaled by the per-block variances.
Matrix energy_covariance(const EnergyParams& params);

// Throws NotPositiveDefinite if the assembled covariance is rejected.
GaussianModel build_energy_covariance(const EnergyParams& params);

// 2T constraints: g_t = p^w_t - c (z^1_t)^3 (wind, t < T) and
// g_{T+t} = z^2_t - p^w_t - p^g_t (load). Positivity z^1_t >= 0 is exposed
// as a ray limit; exit radii are available in closed form.
std::unique_ptr<InequalitySystem> make_energy_system(const EnergyParams& params);

}  // namespace sphrad
