#include "sphrad/radial.hpp"

#include "sphrad/chi_law.hpp"
#include "sphrad/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace sphrad {

void RootOptions::validate() const {
  require(g_tol > 0.0 && d_tol > 0.0 && tie_rel > 0.0 && tie_abs > 0.0,
          "root tolerances must be positive");
  require(r_max >= 0.0, "r_max must be nonnegative");
  require(max_bracket_doublings > 0 && max_bisections > 0, "root iteration caps must be positive");
}

double effective_r_max(const RootOptions& opts, Index dim) {
  if (opts.r_max > 0.0) return opts.r_max;
  return RadialLaw(static_cast<int>(dim)).r_max();
}

DirectionKind classify_direction(const RadialHit& hit) noexcept {
  return hit.finite ? DirectionKind::Finite : DirectionKind::Infinite;
}

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

struct Bracket {
  bool found = false;
  double lo = 0.0;
  double hi = 0.0;
  double h_hi = 0.0;
};

// Finds [lo, hi] with h(lo) < 0 <= h(hi) inside [0, limit] by doubling from 1.
template <class H>
Bracket bracket_root(const H& h, double limit, const RootOptions& opts, bool check_single_crossing) {
  Bracket b;
  double lo = 0.0;
  double r = std::min(1.0, limit);
  for (int k = 0; k <= opts.max_bracket_doublings; ++k) {
    const double hv = h(r);
    if (hv >= 0.0) {
      b = {true, lo, r, hv};
      break;
    }
    if (r >= limit) return b;
    lo = r;
    r = std::min(2.0 * r, limit);
  }
  if (!b.found) return b;
  if (check_single_crossing && b.hi < limit) {
    const double probe = std::min(2.0 * b.hi, limit);
    if (h(probe) < 0.0) {
      fail(ErrorCode::BracketFailure, "constraint re-enters its sublevel set along the ray at r = " +
                                          std::to_string(probe) + " (not quasi-convex)");
    }
  }
  return b;
}

// Bisection to machine resolution, then a single guarded Newton step.
template <class H, class Slope>
double refine_root(const H& h, const Slope& slope, Bracket b, const RootOptions& opts) {
  double lo = b.lo;
  double hi = b.hi;
  double h_hi = b.h_hi;
  for (int it = 0; it < opts.max_bisections && hi - lo > 2.0 * kEps * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double hm = h(mid);
    if (hm >= 0.0) {
      hi = mid;
      h_hi = hm;
    } else {
      lo = mid;
    }
  }
  double best = hi;
  double best_abs = std::abs(h_hi);
  const double s = slope(hi);
  if (s > 0.0 && std::isfinite(s)) {
    const double polished = hi - h_hi / s;
    if (polished >= lo && polished <= hi) {
      const double hp = std::abs(h(polished));
      if (hp <= best_abs) {
        best = polished;
        best_abs = hp;
      }
    }
  }
  const double h_lo = std::abs(h(lo));
  if (h_lo < best_abs) best = lo;
  return best;
}

}  // namespace

RadialHit radial_root_inequality(const InequalitySystem& sys, const Vector& x, const Vector& v,
                                 const GaussianModel& model, const RootOptions& opts) {
  const Vector& base = model.mean();
  const Vector dir = model.factor() * v;
  sys.check_interior(x, base);

  const double r_max = effective_r_max(opts, model.dim());
  const double cap = sys.ray_limit(x, base, dir);
  const double limit = std::min(r_max, cap);
  const std::size_t s = sys.num_constraints();

  std::vector<double> rho_i(s, kInfinity);
  Vector z(base.size());
  for (std::size_t i = 0; i < s; ++i) {
    if (auto closed = sys.exit_radius(i, x, base, dir)) {
      rho_i[i] = *closed;
      continue;
    }
    auto h = [&](double r) {
      z = base + r * dir;
      return sys.value(i, x, z);
    };
    auto slope = [&](double r) {
      z = base + r * dir;
      return sys.grad_z(i, x, z).dot(dir);
    };
    const Bracket b = bracket_root(h, limit, opts, true);
    if (!b.found) continue;
    const double root = refine_root(h, slope, b, opts);
    const double h0 = std::abs(sys.value(i, x, base));
    const double residual = std::abs(h(root));
    if (residual > 10.0 * opts.g_tol * std::max(1.0, h0)) {
      fail(ErrorCode::BracketFailure, "constraint " + std::to_string(i) +
                                          " residual " + std::to_string(residual) + " after root refinement");
    }
    rho_i[i] = root;
  }

  const double rho_min = *std::min_element(rho_i.begin(), rho_i.end());
  RadialHit hit;
  const double band = rho_min * (1.0 + opts.tie_rel) + opts.tie_abs;
  if (cap < r_max && cap <= band) {
    hit.rho = cap;
    hit.finite = true;
    hit.domain_limited = true;
    hit.boundary_point = base + cap * dir;
    return hit;
  }
  if (!(rho_min < r_max)) return hit;

  hit.rho = rho_min;
  hit.finite = true;
  hit.boundary_point = base + rho_min * dir;
  for (std::size_t i = 0; i < s; ++i) {
    if (rho_i[i] <= band) {
      hit.active.push_back(i);
      hit.normals.push_back({i, sys.grad_x(i, x, hit.boundary_point), sys.grad_z(i, x, hit.boundary_point)});
    }
  }
  return hit;
}

RadialHit radial_root_enlarged(const ConvexSetOracle& oracle, const Vector& x, const Vector& v,
                               double eps, const GaussianModel& model, const RootOptions& opts) {
  require(eps > 0.0, "enlargement eps must be positive");
  const Vector& base = model.mean();
  if (!oracle.contains(x, base)) fail(ErrorCode::InteriorViolated, "mean lies outside S(x)");
  const Vector dir = model.factor() * v;
  const double r_max = effective_r_max(opts, model.dim());

  Vector z(base.size());
  auto h = [&](double r) {
    z = base + r * dir;
    return oracle.distance(x, z) - eps;
  };
  auto slope = [&](double r) {
    z = base + r * dir;
    const Vector res = z - oracle.project(x, z);
    const double n = res.norm();
    return n > 0.0 ? res.dot(dir) / n : 0.0;
  };

  RadialHit hit;
  const Bracket b = bracket_root(h, r_max, opts, false);
  if (!b.found) return hit;
  const double root = refine_root(h, slope, b, opts);
  if (std::abs(h(root)) > 10.0 * opts.d_tol * std::max(1.0, eps)) {
    fail(ErrorCode::BracketFailure, "distance residual too large after root refinement");
  }
  hit.rho = root;
  hit.finite = true;
  hit.boundary_point = base + root * dir;
  const Vector res = hit.boundary_point - oracle.project(x, hit.boundary_point);
  hit.active.push_back(0);
  hit.normals.push_back({0, Vector(), res / res.norm()});
  return hit;
}

}  // namespace sphrad
