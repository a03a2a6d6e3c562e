#pragma once

#include "sphrad/types.hpp"

namespace sphrad {

// Law of the random vector xi ~ N(mean, covariance), together with the lower
// Cholesky factor L used to map unit directions onto rays: z = mean + r L v.
class GaussianModel {
 public:
  const Vector& mean() const noexcept { return mean_; }
  const Matrix& covariance() const noexcept { return covariance_; }
  const Matrix& factor() const noexcept { return factor_; }
  Index dim() const noexcept { return mean_.size(); }

  // Point at radius r along the unit direction v.
  Vector ray_point(double r, const Vector& v) const { return mean_ + r * (factor_ * v); }

 private:
  friend GaussianModel build_model(Vector mean, Matrix covariance);

  Vector mean_;
  Matrix covariance_;
  Matrix factor_;
};

// Cholesky-factorises the covariance. Throws NotPositiveDefinite when a pivot
// is not strictly positive, InvalidArgument on shape or symmetry errors.
GaussianModel build_model(Vector mean, Matrix covariance);

// Standard model N(0, I_m).
GaussianModel standard_model(Index m);

}  // namespace sphrad
