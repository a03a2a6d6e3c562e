#include "sphrad/gaussian.hpp"

#include "sphrad/errors.hpp"

#include <cmath>
#include <string>

namespace sphrad {

GaussianModel build_model(Vector mean, Matrix covariance) {
  const Index m = mean.size();
  require(m >= 1, "model dimension must be positive");
  require(covariance.rows() == m && covariance.cols() == m,
          "covariance must be " + std::to_string(m) + "x" + std::to_string(m));
  require(covariance.allFinite() && mean.allFinite(), "model entries must be finite");

  const double scale = 1.0 + covariance.cwiseAbs().maxCoeff();
  require((covariance - covariance.transpose()).cwiseAbs().maxCoeff() <= 1e-10 * scale,
          "covariance is not symmetric");

  // Plain Cholesky on the symmetrised matrix; a pivot <= 0 rejects the model.
  const Matrix sym = 0.5 * (covariance + covariance.transpose());
  Matrix factor = Matrix::Zero(m, m);
  for (Index j = 0; j < m; ++j) {
    double pivot = sym(j, j) - factor.row(j).head(j).squaredNorm();
    if (!(pivot > 0.0)) {
      fail(ErrorCode::NotPositiveDefinite,
           "pivot " + std::to_string(j) + " is " + std::to_string(pivot));
    }
    const double d = std::sqrt(pivot);
    factor(j, j) = d;
    for (Index i = j + 1; i < m; ++i) {
      factor(i, j) = (sym(i, j) - factor.row(i).head(j).dot(factor.row(j).head(j))) / d;
    }
  }

  GaussianModel model;
  model.mean_ = std::move(mean);
  model.covariance_ = std::move(covariance);
  model.factor_ = std::move(factor);
  return model;
}

GaussianModel standard_model(Index m) { return build_model(Vector::Zero(m), Matrix::Identity(m, m)); }

}  // namespace sphrad
