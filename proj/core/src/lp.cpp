#include "sphrad/lp.hpp"

#include "sphrad/errors.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace sphrad::lp {

namespace {

constexpr double kTol = 1e-11;

// Dense tableau: rows [0, m) are constraints, row m is the objective
// (reduced costs, with -objective value in the last column).
class Tableau {
 public:
  Tableau(Index rows, Index cols) : t_(Matrix::Zero(rows + 1, cols + 1)), basis_(static_cast<std::size_t>(rows)) {}

  Index rows() const { return t_.rows() - 1; }
  Index cols() const { return t_.cols() - 1; }
  double& at(Index r, Index c) { return t_(r, c); }
  double& rhs(Index r) { return t_(r, cols()); }
  double& cost(Index c) { return t_(rows(), c); }
  double objective() const { return -t_(rows(), cols()); }
  std::vector<Index>& basis() { return basis_; }

  void pivot(Index r, Index c) {
    t_.row(r) /= t_(r, c);
    for (Index i = 0; i <= rows(); ++i) {
      if (i != r && t_(i, c) != 0.0) t_.row(i) -= t_(i, c) * t_.row(r);
    }
    basis_[static_cast<std::size_t>(r)] = c;
  }

  // Price out the basic columns from the objective row.
  void canonicalise() {
    for (Index r = 0; r < rows(); ++r) {
      const Index c = basis_[static_cast<std::size_t>(r)];
      if (t_(rows(), c) != 0.0) t_.row(rows()) -= t_(rows(), c) * t_.row(r);
    }
  }

  // Bland's rule over columns [0, allowed). Returns Optimal/Unbounded/IterationLimit.
  Status run(Index allowed, int max_iterations, int& iterations) {
    while (iterations < max_iterations) {
      Index enter = -1;
      for (Index c = 0; c < allowed; ++c) {
        if (t_(rows(), c) < -kTol) {
          enter = c;
          break;
        }
      }
      if (enter < 0) return Status::Optimal;
      Index leave = -1;
      double best = std::numeric_limits<double>::infinity();
      for (Index r = 0; r < rows(); ++r) {
        const double a = t_(r, enter);
        if (a > kTol) {
          const double ratio = t_(r, cols()) / a;
          if (ratio < best - kTol ||
              (std::abs(ratio - best) <= kTol && leave >= 0 &&
               basis_[static_cast<std::size_t>(r)] < basis_[static_cast<std::size_t>(leave)])) {
            best = ratio;
            leave = r;
          }
        }
      }
      if (leave < 0) return Status::Unbounded;
      pivot(leave, enter);
      ++iterations;
    }
    return Status::IterationLimit;
  }

 private:
  Matrix t_;
  std::vector<Index> basis_;
};

}  // namespace

Result solve(const Vector& c, const Matrix& A, const Vector& b, const Vector& lower,
             const Vector& upper, int max_iterations) {
  const Index n = c.size();
  const Index p = A.rows();
  require(A.cols() == n || p == 0, "LP: constraint matrix has wrong width");
  require(b.size() == p, "LP: right-hand side has wrong length");
  require(lower.size() == n && upper.size() == n, "LP: bound vectors have wrong length");
  require(lower.allFinite() && upper.allFinite(), "LP: bounds must be finite");

  Result result;
  if ((upper - lower).minCoeff() < -kTol) return result;  // empty box

  // y = x - lower in [0, width]; rows: A y <= b - A lower, then y_j <= width_j.
  const Vector width = (upper - lower).cwiseMax(0.0);
  const Index m = p + n;
  Matrix M(m, n);
  Vector rhs(m);
  if (p > 0) {
    M.topRows(p) = A;
    rhs.head(p) = b - A * lower;
  }
  M.bottomRows(n).setIdentity();
  rhs.tail(n) = width;

  std::vector<Index> needs_art;
  for (Index i = 0; i < m; ++i) {
    if (rhs(i) < 0.0) needs_art.push_back(i);
  }
  const Index n_art = static_cast<Index>(needs_art.size());
  const Index slack0 = n;
  const Index art0 = n + m;
  Tableau tab(m, n + m + n_art);

  Index art = 0;
  for (Index i = 0; i < m; ++i) {
    const double sign = rhs(i) < 0.0 ? -1.0 : 1.0;
    for (Index j = 0; j < n; ++j) tab.at(i, j) = sign * M(i, j);
    tab.at(i, slack0 + i) = sign;
    tab.rhs(i) = sign * rhs(i);
    if (sign < 0.0) {
      tab.at(i, art0 + art) = 1.0;
      tab.basis()[static_cast<std::size_t>(i)] = art0 + art;
      ++art;
    } else {
      tab.basis()[static_cast<std::size_t>(i)] = slack0 + i;
    }
  }

  int iterations = 0;
  if (n_art > 0) {
    for (Index a = 0; a < n_art; ++a) tab.cost(art0 + a) = 1.0;
    tab.canonicalise();
    const Status s1 = tab.run(tab.cols(), max_iterations, iterations);
    if (s1 == Status::IterationLimit) {
      result.status = s1;
      return result;
    }
    if (tab.objective() > 1e-9 * (1.0 + rhs.cwiseAbs().maxCoeff())) {
      result.status = Status::Infeasible;
      result.iterations = iterations;
      return result;
    }
    // Drive remaining artificials out of the basis where possible.
    for (Index r = 0; r < m; ++r) {
      if (tab.basis()[static_cast<std::size_t>(r)] < art0) continue;
      for (Index col = 0; col < art0; ++col) {
        if (std::abs(tab.at(r, col)) > kTol) {
          tab.pivot(r, col);
          break;
        }
      }
    }
    for (Index col = 0; col <= tab.cols(); ++col) tab.cost(col) = 0.0;
    tab.rhs(m) = 0.0;
  }

  for (Index j = 0; j < n; ++j) tab.cost(j) = c(j);
  tab.canonicalise();
  const Status s2 = tab.run(art0, max_iterations, iterations);
  result.iterations = iterations;
  result.status = s2;
  if (s2 != Status::Optimal) return result;

  Vector y = Vector::Zero(n);
  for (Index r = 0; r < m; ++r) {
    const Index col = tab.basis()[static_cast<std::size_t>(r)];
    if (col < n) y(col) = tab.rhs(r);
  }
  result.x = (lower + y).cwiseMax(lower).cwiseMin(upper);
  result.objective = c.dot(result.x);
  return result;
}

}  // namespace sphrad::lp
