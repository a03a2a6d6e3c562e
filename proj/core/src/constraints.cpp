#include "sphrad/constraints.hpp"

#include "sphrad/errors.hpp"

#include <string>

namespace sphrad {

void InequalitySystem::check_interior(const Vector& x, const Vector& point) const {
  for (std::size_t i = 0; i < num_constraints(); ++i) {
    const double g = value(i, x, point);
    if (!(g < 0.0)) {
      fail(ErrorCode::InteriorViolated,
           "constraint " + std::to_string(i) + " has g = " + std::to_string(g) + " >= 0 at the mean");
    }
  }
}

}  // namespace sphrad
