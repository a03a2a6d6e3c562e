#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace sphrad::app {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct VerifyOptions {
  bool quick = false;  // N = 100 directions, SE-scaled tolerances
  std::uint64_t seed = 1;
  int threads = 1;
};

using RadialPdf = std::function<double(int dim, double r)>;

// Integral of pdf(m, .) over [0, inf) equals 1 for m = 1..max_dim.
CheckResult check_chi_normalization(const RadialPdf& pdf, int max_dim = 16);

std::vector<CheckResult> run_checks(const VerifyOptions& opts);

}  // namespace sphrad::app
