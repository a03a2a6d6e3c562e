#pragma once

#include "sphrad/types.hpp"

#include <cstdint>
#include <string_view>

namespace sphrad {

enum class SamplingMethod : std::uint8_t { MonteCarlo, Qmc };

std::string_view to_string(SamplingMethod method) noexcept;
SamplingMethod parse_sampling_method(std::string_view name);

// Equally weighted points on the unit sphere S^{m-1}. Directions are stored
// column-wise.
class DirectionSet {
 public:
  // Empty placeholder; every evaluation rejects it.
  DirectionSet() = default;
  DirectionSet(Matrix directions, std::uint64_t seed, SamplingMethod method, bool antithetic);

  Index dim() const noexcept { return directions_.rows(); }
  Index size() const noexcept { return directions_.cols(); }
  auto direction(Index k) const { return directions_.col(k); }
  const Matrix& directions() const noexcept { return directions_; }
  double weight() const noexcept { return 1.0 / static_cast<double>(size()); }

  std::uint64_t seed() const noexcept { return seed_; }
  SamplingMethod method() const noexcept { return method_; }
  // When set, columns 2j and 2j+1 are exact negatives of each other.
  bool antithetic() const noexcept { return antithetic_; }

 private:
  Matrix directions_;
  std::uint64_t seed_ = 0;
  SamplingMethod method_ = SamplingMethod::MonteCarlo;
  bool antithetic_ = false;
};

// Monte Carlo: normalised Gaussian draws from a counter-based generator keyed
// by (seed, direction index, coordinate). QMC: Owen-scrambled Sobol points
// mapped through the inverse normal cdf, then normalised. Antithetic pairs
// (v, -v) are formed whenever n is even.
DirectionSet sample_sphere(Index m, Index n, std::uint64_t seed, SamplingMethod method);

namespace detail {
std::uint64_t splitmix64(std::uint64_t x) noexcept;
// Uniform in (0,1) from a 64-bit key.
double to_open_unit(std::uint64_t bits) noexcept;
double inverse_normal_cdf(double u);
}  // namespace detail

}  // namespace sphrad
