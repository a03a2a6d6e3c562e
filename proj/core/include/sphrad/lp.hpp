#pragma once

#include "sphrad/types.hpp"

#include <cstdint>

namespace sphrad::lp {

enum class Status : std::uint8_t { Optimal, Infeasible, Unbounded, IterationLimit };

struct Result {
  Status status = Status::Infeasible;
  Vector x;
  double objective = 0.0;
  int iterations = 0;
};

// min c^T x  s.t.  A x <= b,  lower <= x <= upper  (all bounds finite).
// Dense two-phase simplex with Bland's rule on the shifted variables
// y = x - lower, with the upper bounds carried as explicit rows.
Result solve(const Vector& c, const Matrix& A, const Vector& b, const Vector& lower,
             const Vector& upper, int max_iterations = 10000);

}  // namespace sphrad::lp
