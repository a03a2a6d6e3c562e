#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <limits>

namespace sphrad {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

}  // namespace sphrad
