#include "sphrad_app/verify.hpp"

#include "sphrad/chi_law.hpp"
#include "sphrad/energy.hpp"
#include "sphrad/errors.hpp"
#include "sphrad/fixtures.hpp"
#include "sphrad/probability.hpp"
#include "sphrad/radial.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace sphrad::app {

namespace {

double normal_cdf(double t) { return 0.5 * std::erfc(-t / std::numbers::sqrt2); }
double normal_pdf(double t) { return std::exp(-0.5 * t * t) / std::sqrt(2.0 * std::numbers::pi); }

struct Budget {
  int n;
  double se_factor;
  int instances;
  long rejection_draws;
};

Budget budget(const VerifyOptions& o) {
  return o.quick ? Budget{100, 4.0, 20, 20000} : Budget{10000, 3.0, 100, 1000000};
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

template <class Fn>
CheckResult guarded(const std::string& name, Fn&& fn) {
  CheckResult r{name, false, ""};
  try {
    fn(r);
  } catch (const std::exception& e) {
    r.passed = false;
    r.detail = std::string("exception: ") + e.what();
  }
  return r;
}

Vector scalar(double x) { return Vector::Constant(1, x); }

// |estimate - exact| <= max(floor, k * se) for value and first gradient entry.
void compare(CheckResult& r, const GradEstimate& g, double value, double grad, double k) {
  const double ev = std::abs(g.value - value);
  const double eg = std::abs(g.gradient(0) - grad);
  const double tv = std::max(1e-3, k * g.value_std_error);
  const double tg = std::max(1e-3, k * g.std_error(0));
  r.passed = r.passed && ev <= tv && eg <= tg;
  r.detail += "|dphi|=" + fmt(ev) + " |dgrad|=" + fmt(eg) + "; ";
}

}  // namespace

CheckResult check_chi_normalization(const RadialPdf& pdf, int max_dim) {
  return guarded("chi_normalization", [&](CheckResult& r) {
    double worst = 0.0;
    for (int m = 1; m <= max_dim; ++m) {
      const double upper = RadialLaw(m).r_max() + 2.0;
      const double mass = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
          [&](double t) { return pdf(m, t); }, 0.0, upper, 12, 1e-13);
      worst = std::max(worst, std::abs(mass - 1.0));
    }
    r.passed = worst <= 1e-8;
    r.detail = "max |mass - 1| = " + fmt(worst);
  });
}

std::vector<CheckResult> run_checks(const VerifyOptions& opts) {
  const Budget b = budget(opts);
  EvalOptions eval;
  eval.threads = opts.threads;
  std::vector<CheckResult> out;

  out.push_back(check_chi_normalization([](int m, double r) { return RadialLaw(m).pdf(r); }));

  out.push_back(guarded("halfspace_analytic", [&](CheckResult& r) {
    r.passed = true;
    for (Index m : {2, 4, 8}) {
      const DirectionSet dirs = sample_sphere(m, b.n, opts.seed, SamplingMethod::Qmc);
      const GradEstimate g = prob_gradient(*make_halfspace(Vector::Unit(m, 0)), scalar(1.0), standard_model(m), dirs, eval);
      compare(r, g, normal_cdf(1.0), normal_pdf(1.0), b.se_factor);
    }
  }));

  out.push_back(guarded("slab_analytic", [&](CheckResult& r) {
    r.passed = true;
    const double tau = std::sqrt(std::exp(2.0) - 1.0);
    const double value = 2.0 * normal_cdf(tau) - 1.0;
    const double grad = -2.0 * normal_pdf(tau) * std::exp(2.0) / tau;
    for (Index m : {2, 4, 8}) {
      const DirectionSet dirs = sample_sphere(m, b.n, opts.seed, SamplingMethod::Qmc);
      const GradEstimate g =
          prob_gradient(*make_slab(Vector::Unit(m, 0), identity_map()), scalar(-1.0), standard_model(m), dirs, eval);
      compare(r, g, value, grad, b.se_factor);
    }
  }));

  out.push_back(guarded("crn_gradient_identity", [&](CheckResult& r) {
    const EnergyParams params;
    Vector xe(8);
    xe << 0.3, 0.35, 0.35, 0.3, 11.2, 11.1, 11.1, 11.3;
    struct Case {
      std::shared_ptr<InequalitySystem> sys;
      GaussianModel model;
      Vector x;
    };
    std::vector<Case> cases;
    cases.push_back({make_halfspace(Vector::Unit(3, 0)), standard_model(3), scalar(1.0)});
    cases.push_back({make_slab(Vector{{0.6, 0.8}}, identity_map()), standard_model(2), scalar(-1.0)});
    cases.push_back({make_ball_system(Vector::Zero(2)), standard_model(2), scalar(1.3)});
    cases.push_back({make_hyperbolic_system(), standard_model(2), scalar(1.0)});
    cases.push_back({make_energy_system(params), build_energy_covariance(params), xe});
    double worst = 0.0;
    int skipped = 0;
    for (const auto& c : cases) {
      const DirectionSet dirs = sample_sphere(c.model.dim(), std::min(b.n, 2000), opts.seed + 1, SamplingMethod::Qmc);
      const FdCheck fd = fd_check(*c.sys, c.x, c.model, dirs, 1e-5, eval);
      if (fd.active_set_changed) {
        ++skipped;
        continue;
      }
      worst = std::max(worst, fd.rel_err);
    }
    r.passed = worst <= 1e-6 && skipped < static_cast<int>(cases.size());
    r.detail = "max rel err " + fmt(worst) + ", skipped " + std::to_string(skipped);
  }));

  out.push_back(guarded("radial_monotonicity", [&](CheckResult& r) {
    auto set = make_hyperbolic_set();
    auto sys = make_hyperbolic_system();
    const GaussianModel model = standard_model(2);
    std::mt19937_64 rng(opts.seed);
    std::normal_distribution<double> n;
    std::uniform_real_distribution<double> ux(0.3, 3.5);
    int failures = 0;
    for (int k = 0; k < b.instances; ++k) {
      const Vector x = scalar(ux(rng));
      const Vector v = Vector{{n(rng), n(rng)}}.normalized();
      const double r0 = radial_root_inequality(*sys, x, v, model).rho;
      const double r1 = radial_root_enlarged(*set, x, v, 0.01, model).rho;
      const double r2 = radial_root_enlarged(*set, x, v, 0.1, model).rho;
      if (!(r0 <= r1 && r1 <= r2)) ++failures;
      if (!std::isfinite(r1)) continue;
      // distance keeps growing past the exit point
      double prev = 0.0;
      for (double t = 1.0; t <= 3.0; t += 0.5) {
        const double d = set->distance(x, model.ray_point(t * r1, v));
        if (d < prev - 1e-12) ++failures;
        prev = d;
      }
    }
    r.passed = failures == 0;
    r.detail = std::to_string(b.instances) + " instances, " + std::to_string(failures) + " failures";
  }));

  out.push_back(guarded("enlargement_limit", [&](CheckResult& r) {
    const GaussianModel model = standard_model(2);
    const DirectionSet dirs = sample_sphere(2, b.n, opts.seed + 2, SamplingMethod::Qmc);
    r.passed = true;
    auto run = [&](const ConvexSetOracle& set, const InequalitySystem& sys) {
      const double exact = prob_value(sys, scalar(1.0), model, dirs, eval).value;
      double prev = 1.0 + 1e-15;
      double last = prev;
      for (double eps : {0.5, 0.1, 0.01, 0.001}) {
        last = prob_value(set, eps, scalar(1.0), model, dirs, eval).value;
        r.passed = r.passed && last <= prev;
        prev = last;
      }
      r.passed = r.passed && std::abs(last - exact) <= 2e-3;
      r.detail += "gap " + fmt(last - exact) + "; ";
    };
    run(*make_ball(Vector::Zero(2)), *make_ball_system(Vector::Zero(2)));
    run(*make_hyperbolic_set(), *make_hyperbolic_system());
  }));

  out.push_back(guarded("growth_condition", [&](CheckResult& r) {
    const GaussianModel model = standard_model(2);
    const DirectionSet dirs = sample_sphere(2, std::min(b.n, 2000), opts.seed + 3, SamplingMethod::Qmc);
    const GrowthDiagnostic half = growth_report(*make_halfspace(Vector::Unit(2, 0)), scalar(1.0), dirs, model, eval);
    const GrowthDiagnostic hyp = growth_report(*make_hyperbolic_system(), scalar(1.0), dirs, model, eval);
    r.passed = std::abs(half.max_ratio - 1.0) <= 1e-12 && hyp.max_ratio <= 1.0 + 1e-12 && half.all_finite &&
               hyp.all_finite;
    r.detail = "halfspace " + fmt(half.max_ratio) + ", hyperbolic " + fmt(hyp.max_ratio);
  }));

  out.push_back(guarded("hyperbolic_vs_rejection", [&](CheckResult& r) {
    const DirectionSet dirs = sample_sphere(2, b.n, opts.seed + 4, SamplingMethod::Qmc);
    const ProbEstimate est = prob_value(*make_hyperbolic_system(), scalar(1.0), standard_model(2), dirs, eval);
    std::mt19937_64 rng(opts.seed + 5);
    std::normal_distribution<double> n;
    long hits = 0;
    for (long k = 0; k < b.rejection_draws; ++k) {
      const double z1 = n(rng);
      const double z2 = n(rng);
      if (z1 >= -2.0 && z2 >= -2.0 && (z1 + 2.0) * (z2 + 2.0) >= 1.0) ++hits;
    }
    const double p = static_cast<double>(hits) / static_cast<double>(b.rejection_draws);
    const double se = std::sqrt(p * (1.0 - p) / static_cast<double>(b.rejection_draws));
    const double combined = std::hypot(se, est.std_error);
    r.passed = std::abs(est.value - p) <= b.se_factor * combined;
    r.detail = "phi=" + fmt(est.value) + " mc=" + fmt(p) + " z=" + fmt((est.value - p) / combined);
  }));

  out.push_back(guarded("energy_model", [&](CheckResult& r) {
    const EnergyParams params;
    const GaussianModel model = build_energy_covariance(params);
    const double bound = params.wind_coeff * std::pow(params.mu_wind, 3);
    Vector x = Vector::Zero(8);
    x.tail(4).setConstant(params.gen_upper);
    make_energy_system(params)->check_interior(x, model.mean());
    r.passed = std::abs(bound - 2.4220) <= 1e-4;
    r.detail = "c*mu^3 = " + fmt(bound);
  }));

  return out;
}

}  // namespace sphrad::app
