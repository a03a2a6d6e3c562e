#include "sphrad/directions.hpp"

#include "sphrad/errors.hpp"

#include <boost/math/special_functions/erf.hpp>
#include <boost/random/sobol.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace sphrad {

std::string_view to_string(SamplingMethod method) noexcept {
  return method == SamplingMethod::Qmc ? "qmc" : "mc";
}

SamplingMethod parse_sampling_method(std::string_view name) {
  if (name == "mc" || name == "monte_carlo") return SamplingMethod::MonteCarlo;
  if (name == "qmc") return SamplingMethod::Qmc;
  fail(ErrorCode::InvalidArgument, "unknown sampling method '" + std::string(name) + "'");
}

DirectionSet::DirectionSet(Matrix directions, std::uint64_t seed, SamplingMethod method,
                           bool antithetic)
    : directions_(std::move(directions)), seed_(seed), method_(method), antithetic_(antithetic) {
  require(directions_.rows() >= 1 && directions_.cols() >= 1, "direction set must be non-empty");
}

namespace detail {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double to_open_unit(std::uint64_t bits) noexcept {
  // 53 random bits, centred in their cell so 0 and 1 are never produced.
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

double inverse_normal_cdf(double u) {
  return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * u);
}

}  // namespace detail

namespace {

using detail::splitmix64;

std::uint64_t stream_key(std::uint64_t seed, std::uint64_t index, std::uint64_t coord) {
  return splitmix64(splitmix64(splitmix64(seed) ^ index) + coord);
}

// Hash-based nested uniform (Owen) scrambling of a 32-bit binary fraction.
std::uint32_t reverse_bits(std::uint32_t x) {
  x = ((x >> 1) & 0x55555555u) | ((x & 0x55555555u) << 1);
  x = ((x >> 2) & 0x33333333u) | ((x & 0x33333333u) << 2);
  x = ((x >> 4) & 0x0f0f0f0fu) | ((x & 0x0f0f0f0fu) << 4);
  x = ((x >> 8) & 0x00ff00ffu) | ((x & 0x00ff00ffu) << 8);
  return (x >> 16) | (x << 16);
}

std::uint32_t laine_karras_permutation(std::uint32_t x, std::uint32_t seed) {
  x += seed;
  x ^= x * 0x6c50b47cu;
  x ^= x * 0xb82f1e52u;
  x ^= x * 0xc7afe638u;
  x ^= x * 0x8d22f6e6u;
  return x;
}

std::uint32_t owen_scramble(std::uint32_t x, std::uint32_t seed) {
  return reverse_bits(laine_karras_permutation(reverse_bits(x), seed));
}

void normalize_into(Matrix& out, Index col, Vector& g) {
  const double norm = g.norm();
  if (norm > 0.0) {
    out.col(col) = g / norm;
  } else {
    out.col(col).setZero();
    out(0, col) = 1.0;
  }
}

}  // namespace

DirectionSet sample_sphere(Index m, Index n, std::uint64_t seed, SamplingMethod method) {
  require(m >= 1, "sphere dimension must be positive");
  require(n >= 1, "direction count must be positive");

  const bool antithetic = n % 2 == 0;
  const Index base_count = antithetic ? n / 2 : n;
  Matrix out(m, n);
  Vector g(m);

  auto emit = [&](Index k) {
    if (antithetic) {
      normalize_into(out, 2 * k, g);
      out.col(2 * k + 1) = -out.col(2 * k);
    } else {
      normalize_into(out, k, g);
    }
  };

  if (method == SamplingMethod::MonteCarlo) {
    for (Index k = 0; k < base_count; ++k) {
      for (Index j = 0; j < m; ++j) {
        const auto bits = stream_key(seed, static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(j));
        g(j) = detail::inverse_normal_cdf(detail::to_open_unit(bits));
      }
      emit(k);
    }
  } else {
    // Point 0 of the Sobol sequence is the origin; boost starts at point 1.
    boost::random::sobol sobol(static_cast<std::size_t>(m));
    std::vector<std::uint32_t> scramble_seed(static_cast<std::size_t>(m));
    for (Index j = 0; j < m; ++j) {
      scramble_seed[static_cast<std::size_t>(j)] =
          static_cast<std::uint32_t>(splitmix64(seed ^ (0xa0761d6478bd642fULL * (j + 1))) >> 32);
    }
    for (Index k = 0; k < base_count; ++k) {
      for (Index j = 0; j < m; ++j) {
        const std::uint64_t raw = k == 0 ? 0 : sobol();
        const auto top = static_cast<std::uint32_t>(raw >> 32);
        const std::uint32_t scrambled = owen_scramble(top, scramble_seed[static_cast<std::size_t>(j)]);
        const double jitter = detail::to_open_unit(
            stream_key(seed, static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(j) + 0x51ed27ULL));
        const double u = std::clamp((static_cast<double>(scrambled) + jitter) * 0x1.0p-32,
                                    0x1.0p-60, 1.0 - 0x1.0p-53);
        g(j) = detail::inverse_normal_cdf(u);
      }
      emit(k);
    }
  }
  return DirectionSet(std::move(out), seed, method, antithetic);
}

}  // namespace sphrad
