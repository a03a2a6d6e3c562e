#include "sphrad/chi_law.hpp"

#include "sphrad/errors.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <numbers>

namespace sphrad {

RadialLaw::RadialLaw(int dim) : dim_(dim) {
  require(dim >= 1, "chi law needs at least one degree of freedom");
  const double half = 0.5 * dim;
  log_norm_ = (1.0 - half) * std::numbers::ln2 - std::lgamma(half);
  r_max_ = quantile_upper(kTruncationTail);
}

double RadialLaw::cdf(double r) const {
  if (std::isinf(r)) return 1.0;
  if (r <= 0.0) return 0.0;
  return boost::math::gamma_p(0.5 * dim_, 0.5 * r * r);
}

double RadialLaw::pdf(double r) const {
  if (std::isinf(r) || r < 0.0) return 0.0;
  if (r == 0.0) return dim_ == 1 ? std::exp(log_norm_) : 0.0;
  return std::exp(log_norm_ + (dim_ - 1) * std::log(r) - 0.5 * r * r);
}

double RadialLaw::quantile_upper(double tail) const {
  require(tail > 0.0 && tail < 1.0, "tail probability must lie in (0,1)");
  return std::sqrt(2.0 * boost::math::gamma_q_inv(0.5 * dim_, tail));
}

double chi_cdf(const RadialLaw& law, double r) { return law.cdf(r); }
double chi_pdf(const RadialLaw& law, double r) { return law.pdf(r); }

}  // namespace sphrad
