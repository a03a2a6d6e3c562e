#pragma once

#include "sphrad/types.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <span>
#include <thread>
#include <vector>

namespace sphrad::detail {

// Runs body(k) for k in [0, n) on up to `threads` workers. Each index is
// handled exactly once, so results written per index do not depend on the
// thread count. The first exception (by chunk order) is rethrown.
template <class Body>
void parallel_for(Index n, int threads, const Body& body) {
  const Index workers = std::clamp<Index>(threads, 1, std::max<Index>(n, 1));
  if (workers == 1) {
    for (Index k = 0; k < n; ++k) body(k);
    return;
  }
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
  {
    std::vector<std::jthread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    const Index chunk = (n + workers - 1) / workers;
    for (Index w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          const Index end = std::min(n, (w + 1) * chunk);
          for (Index k = w * chunk; k < end; ++k) body(k);
        } catch (...) {
          errors[static_cast<std::size_t>(w)] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

// Fixed-shape pairwise summation.
inline double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

// Standard error of the mean of `values`; antithetic pairs (2j, 2j+1) are
// averaged first since they are not independent.
inline double standard_error(std::span<const double> values, bool antithetic) {
  std::vector<double> units;
  if (antithetic) {
    units.reserve(values.size() / 2);
    for (std::size_t j = 0; j + 1 < values.size(); j += 2) units.push_back(0.5 * (values[j] + values[j + 1]));
  } else {
    units.assign(values.begin(), values.end());
  }
  const std::size_t n = units.size();
  if (n < 2) return 0.0;
  const double mean = pairwise_sum(units) / static_cast<double>(n);
  for (double& u : units) u = (u - mean) * (u - mean);
  const double var = pairwise_sum(units) / static_cast<double>(n - 1);
  return std::sqrt(var / static_cast<double>(n));
}

}  // namespace sphrad::detail
