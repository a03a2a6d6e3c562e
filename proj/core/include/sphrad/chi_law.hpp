#pragma once

namespace sphrad {

// Radial part of a standard Gaussian in R^m: the chi law with m degrees of
// freedom. Its cdf is the probability mass of a ray segment [0, r] and its
// pdf is the weight applied to boundary sensitivities.
class RadialLaw {
 public:
  explicit RadialLaw(int dim);

  int dim() const noexcept { return dim_; }

  // P[R <= r] = P(m/2, r^2/2); r must be >= 0, +inf gives 1.
  double cdf(double r) const;
  // 2^{1-m/2} r^{m-1} exp(-r^2/2) / Gamma(m/2).
  double pdf(double r) const;
  // Inverse of cdf, expressed through the upper tail to stay accurate near 1.
  double quantile_upper(double tail) const;

  // Truncation radius: mass beyond it is below kTruncationTail.
  double r_max() const noexcept { return r_max_; }

  static constexpr double kTruncationTail = 1e-12;

 private:
  int dim_;
  double log_norm_;
  double r_max_;
};

double chi_cdf(const RadialLaw& law, double r);
double chi_pdf(const RadialLaw& law, double r);

}  // namespace sphrad
