#include "sphrad/probability.hpp"

#include "parallel.hpp"
#include "sphrad/chi_law.hpp"
#include "sphrad/errors.hpp"

#include <cmath>
#include <string>

namespace sphrad {

std::string_view to_string(TiePolicy policy) noexcept {
  return policy == TiePolicy::MinIndex ? "min_index" : "average";
}

TiePolicy parse_tie_policy(std::string_view name) {
  if (name == "average") return TiePolicy::Average;
  if (name == "min_index") return TiePolicy::MinIndex;
  fail(ErrorCode::InvalidArgument, "unknown tie policy '" + std::string(name) + "'");
}

namespace {

void check_shapes(Index x_size, Index x_dim, Index z_dim, const GaussianModel& model,
                  const DirectionSet& dirs) {
  require(x_size == x_dim, "decision has dimension " + std::to_string(x_size) + ", expected " +
                               std::to_string(x_dim));
  require(model.dim() == z_dim, "model dimension does not match the constraint system");
  require(dirs.dim() == z_dim, "direction set dimension does not match the model");
  require(dirs.size() >= 1, "direction budget must be positive");
}

EvalOptions resolved(const EvalOptions& opts, Index dim) {
  opts.root.validate();
  require(opts.slope_floor > 0.0, "slope floor must be positive");
  EvalOptions out = opts;
  out.root.r_max = effective_r_max(opts.root, dim);
  return out;
}

struct Contribution {
  RadialHit hit;
  double value = 1.0;
};

// Shared per-direction driver: `radial(k)` returns the hit for direction k.
template <class Radial>
ProbEstimate assemble_value(const DirectionSet& dirs, const RadialLaw& law, const EvalOptions& opts,
                            const Radial& radial) {
  const Index n = dirs.size();
  std::vector<Contribution> per(static_cast<std::size_t>(n));
  detail::parallel_for(n, opts.threads, [&](Index k) {
    auto& c = per[static_cast<std::size_t>(k)];
    c.hit = radial(k);
    c.value = c.hit.finite ? law.cdf(c.hit.rho) : 1.0;
  });

  std::vector<double> values(per.size());
  ProbEstimate est;
  for (std::size_t k = 0; k < per.size(); ++k) {
    values[k] = per[k].value;
    if (!per[k].hit.finite) ++est.n_infinite;
  }
  est.value = detail::pairwise_sum(values) / static_cast<double>(n);
  est.std_error = detail::standard_error(values, dirs.antithetic());
  if (opts.keep_records) {
    est.per_direction.reserve(per.size());
    for (std::size_t k = 0; k < per.size(); ++k) {
      est.per_direction.push_back({static_cast<Index>(k), std::move(per[k].hit), per[k].value});
    }
  }
  return est;
}

struct GradTerm {
  double value = 1.0;
  Vector w;
  bool tie = false;
  bool infinite = true;
};

GradEstimate reduce_gradient(std::vector<GradTerm>& terms, Index x_dim, bool antithetic,
                             bool keep_records) {
  const auto n = static_cast<double>(terms.size());
  GradEstimate est;
  est.gradient.resize(x_dim);
  est.std_error.resize(x_dim);
  std::vector<double> column(terms.size());
  for (Index j = 0; j < x_dim; ++j) {
    for (std::size_t k = 0; k < terms.size(); ++k) column[k] = terms[k].w(j);
    est.gradient(j) = detail::pairwise_sum(column) / n;
    est.std_error(j) = detail::standard_error(column, antithetic);
  }
  std::size_t ties = 0;
  for (std::size_t k = 0; k < terms.size(); ++k) {
    column[k] = terms[k].value;
    if (terms[k].tie) ++ties;
    if (terms[k].infinite) ++est.n_infinite;
  }
  est.value = detail::pairwise_sum(column) / n;
  est.value_std_error = detail::standard_error(column, antithetic);
  est.tie_fraction = static_cast<double>(ties) / n;
  if (keep_records) {
    est.per_direction.reserve(terms.size());
    for (auto& t : terms) est.per_direction.push_back(std::move(t.w));
  }
  return est;
}

[[noreturn]] void transversality_failure(Index k, double slope) {
  fail(ErrorCode::TransversalityBreakdown,
       "direction " + std::to_string(k) + " has boundary slope " + std::to_string(slope));
}

}  // namespace

ProbEstimate prob_value(const InequalitySystem& sys, const Vector& x, const GaussianModel& model,
                        const DirectionSet& dirs, const EvalOptions& opts) {
  check_shapes(x.size(), sys.x_dim(), sys.z_dim(), model, dirs);
  const EvalOptions local = resolved(opts, model.dim());
  sys.check_interior(x, model.mean());
  const RadialLaw law(static_cast<int>(model.dim()));
  return assemble_value(dirs, law, local, [&](Index k) {
    return radial_root_inequality(sys, x, dirs.direction(k), model, local.root);
  });
}

ProbEstimate prob_value(const ConvexSetOracle& oracle, double eps, const Vector& x,
                        const GaussianModel& model, const DirectionSet& dirs,
                        const EvalOptions& opts) {
  check_shapes(x.size(), oracle.x_dim(), oracle.z_dim(), model, dirs);
  require(eps > 0.0, "enlargement eps must be positive");
  const EvalOptions local = resolved(opts, model.dim());
  if (!oracle.contains(x, model.mean())) fail(ErrorCode::InteriorViolated, "mean lies outside S(x)");
  const RadialLaw law(static_cast<int>(model.dim()));
  return assemble_value(dirs, law, local, [&](Index k) {
    return radial_root_enlarged(oracle, x, dirs.direction(k), eps, model, local.root);
  });
}

GradEstimate prob_gradient(const InequalitySystem& sys, const Vector& x, const GaussianModel& model,
                           const DirectionSet& dirs, const EvalOptions& opts) {
  check_shapes(x.size(), sys.x_dim(), sys.z_dim(), model, dirs);
  const EvalOptions local = resolved(opts, model.dim());
  sys.check_interior(x, model.mean());
  const RadialLaw law(static_cast<int>(model.dim()));
  const Index n = dirs.size();
  const Index x_dim = sys.x_dim();

  std::vector<GradTerm> terms(static_cast<std::size_t>(n));
  detail::parallel_for(n, local.threads, [&](Index k) {
    auto& t = terms[static_cast<std::size_t>(k)];
    t.w = Vector::Zero(x_dim);
    const Vector v = dirs.direction(k);
    const RadialHit hit = radial_root_inequality(sys, x, v, model, local.root);
    if (!hit.finite) return;
    t.infinite = false;
    t.value = law.cdf(hit.rho);
    if (hit.domain_limited || hit.normals.empty()) return;
    t.tie = hit.normals.size() > 1;

    const Vector dir = model.factor() * v;
    const std::size_t used = local.tie_policy == TiePolicy::MinIndex ? 1 : hit.normals.size();
    const double lambda = 1.0 / static_cast<double>(used);
    const double density = law.pdf(hit.rho);
    for (std::size_t a = 0; a < used; ++a) {
      const auto& nrm = hit.normals[a];
      const double slope = nrm.grad_z.dot(dir);
      if (!(slope > local.slope_floor)) transversality_failure(k, slope);
      t.w -= (lambda * density / slope) * nrm.grad_x;
    }
  });
  return reduce_gradient(terms, x_dim, dirs.antithetic(), local.keep_records);
}

GradEstimate prob_gradient_enlarged(const ConvexSetOracle& oracle, const Vector& x, double eps,
                                    const GaussianModel& model, const DirectionSet& dirs,
                                    const EvalOptions& opts) {
  check_shapes(x.size(), oracle.x_dim(), oracle.z_dim(), model, dirs);
  require(eps > 0.0, "enlargement eps must be positive");
  const EvalOptions local = resolved(opts, model.dim());
  if (!oracle.contains(x, model.mean())) fail(ErrorCode::InteriorViolated, "mean lies outside S(x)");
  if (!oracle.half_sq_distance_grad_x(x, model.mean(), model.mean())) {
    fail(ErrorCode::MissingSensitivity, "oracle does not expose the x-sensitivity of d^2/2");
  }
  const RadialLaw law(static_cast<int>(model.dim()));
  const Index n = dirs.size();
  const Index x_dim = oracle.x_dim();

  std::vector<GradTerm> terms(static_cast<std::size_t>(n));
  detail::parallel_for(n, local.threads, [&](Index k) {
    auto& t = terms[static_cast<std::size_t>(k)];
    t.w = Vector::Zero(x_dim);
    const Vector v = dirs.direction(k);
    const RadialHit hit = radial_root_enlarged(oracle, x, v, eps, model, local.root);
    if (!hit.finite) return;
    t.infinite = false;
    t.value = law.cdf(hit.rho);

    const Vector& z = hit.boundary_point;
    const Vector proj = oracle.project(x, z);
    const Vector residual = z - proj;
    const double slope = residual.dot(model.factor() * v);
    if (!(slope > local.slope_floor)) transversality_failure(k, slope);
    const auto sens = oracle.half_sq_distance_grad_x(x, z, proj);
    if (!sens) fail(ErrorCode::MissingSensitivity, "oracle sensitivity unavailable at a boundary point");
    t.w = -(law.pdf(hit.rho) / slope) * *sens;
  });
  return reduce_gradient(terms, x_dim, dirs.antithetic(), local.keep_records);
}

GrowthDiagnostic growth_report(const InequalitySystem& sys, const Vector& x,
                               const DirectionSet& dirs, const GaussianModel& model,
                               const EvalOptions& opts) {
  check_shapes(x.size(), sys.x_dim(), sys.z_dim(), model, dirs);
  EvalOptions local = resolved(opts, model.dim());
  local.keep_records = true;
  const ProbEstimate est = prob_value(sys, x, model, dirs, local);

  GrowthDiagnostic diag;
  for (const auto& rec : est.per_direction) {
    for (const auto& nrm : rec.hit.normals) {
      ++diag.points_checked;
      const double gz = nrm.grad_z.norm();
      if (!(gz > 0.0) || !nrm.grad_x.allFinite()) {
        diag.all_finite = false;
        continue;
      }
      const double ratio = nrm.grad_x.norm() / gz;
      if (ratio > diag.max_ratio) {
        diag.max_ratio = ratio;
        diag.argmax_norm = (rec.hit.boundary_point - model.mean()).norm();
        diag.argmax_direction = static_cast<std::size_t>(rec.index);
      }
    }
  }
  return diag;
}

FdCheck fd_check(const InequalitySystem& sys, const Vector& x, const GaussianModel& model,
                 const DirectionSet& dirs, double step, const EvalOptions& opts) {
  require(step > 0.0, "finite-difference step must be positive");
  EvalOptions local = opts;
  local.keep_records = true;

  FdCheck out;
  const ProbEstimate centre = prob_value(sys, x, model, dirs, local);
  out.gradient = prob_gradient(sys, x, model, dirs, opts).gradient;
  out.fd_gradient.resize(x.size());

  auto same_pattern = [&](const ProbEstimate& other) {
    for (std::size_t k = 0; k < centre.per_direction.size(); ++k) {
      const RadialHit& a = centre.per_direction[k].hit;
      const RadialHit& b = other.per_direction[k].hit;
      if (a.finite != b.finite || a.domain_limited != b.domain_limited || a.active != b.active) return false;
    }
    return true;
  };

  for (Index j = 0; j < x.size(); ++j) {
    const double h = step * std::max(1.0, std::abs(x(j)));
    Vector xp = x;
    Vector xm = x;
    xp(j) += h;
    xm(j) -= h;
    const ProbEstimate up = prob_value(sys, xp, model, dirs, local);
    const ProbEstimate down = prob_value(sys, xm, model, dirs, local);
    if (!same_pattern(up) || !same_pattern(down)) out.active_set_changed = true;
    out.fd_gradient(j) = (up.value - down.value) / (xp(j) - xm(j));
  }
  out.max_abs_err = (out.fd_gradient - out.gradient).cwiseAbs().maxCoeff();
  const double scale = out.gradient.cwiseAbs().maxCoeff();
  out.rel_err = scale > 0.0 ? out.max_abs_err / scale : out.max_abs_err;
  return out;
}

}  // namespace sphrad
