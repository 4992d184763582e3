#include "rescrl/simplex.hpp"

#include "rescrl/errors.hpp"
#include "rescrl/tolerances.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace rescrl::lp {

std::string to_string(LpStatus status) {
  switch (status) {
    case LpStatus::optimal: return "optimal";
    case LpStatus::infeasible: return "infeasible";
    case LpStatus::unbounded: return "unbounded";
  }
  return "unknown";
}

namespace {

constexpr double kEps = Tolerances::lp_pivot;

/**
 * Tableau layout: rows 0..m-1 are constraints, row m is the objective row
 * holding reduced costs z_j - c_j for a maximization; the last column is
 * the right-hand side.
 */
class Tableau {
public:
  Tableau(Matrix body, std::vector<int> basis, int num_columns)
      : t_(std::move(body)), basis_(std::move(basis)), cols_(num_columns),
        active_(t_.rows() - 1, true) {}

  int rows() const { return static_cast<int>(t_.rows()) - 1; }
  int cols() const { return cols_; }
  double rhs(int r) const { return t_(r, cols_); }
  double value() const { return t_(rows(), cols_); }
  const std::vector<int>& basis() const { return basis_; }
  bool active(int r) const { return active_[r]; }
  double entry(int r, int c) const { return t_(r, c); }

  void set_objective(const Vector& cost) {
    const Eigen::Index m = t_.rows() - 1;
    t_.row(m).setZero();
    t_.row(m).head(cols_) = -cost.transpose();
    for (std::size_t r = 0; r < basis_.size(); ++r) {
      if (!active_[r]) continue;
      const double cb = cost(basis_[r]);
      if (cb != 0.0) t_.row(m) += cb * t_.row(static_cast<Eigen::Index>(r));
    }
  }

  void pivot(int r, int c) {
    t_.row(r) /= t_(r, c);
    for (int i = 0; i <= rows(); ++i) {
      if (i == r || (i < rows() && !active_[i])) continue;
      const double f = t_(i, c);
      if (f != 0.0) t_.row(i) -= f * t_.row(r);
    }
    basis_[r] = c;
    ++pivots_;
  }

  void drop_row(int r) { active_[r] = false; }
  long pivots() const { return pivots_; }

  /// Runs Bland's rule over columns with allowed[c]; returns false when unbounded.
  bool optimize(const std::vector<bool>& allowed, long budget) {
    for (;;) {
      int enter = -1;
      for (int c = 0; c < cols_; ++c) {
        if (allowed[c] && t_(rows(), c) < -kEps) {
          enter = c;
          break;
        }
      }
      if (enter < 0) return true;
      int leave = -1;
      double best = std::numeric_limits<double>::infinity();
      for (int r = 0; r < rows(); ++r) {
        if (!active_[r] || t_(r, enter) <= kEps) continue;
        const double ratio = std::max(0.0, t_(r, cols_)) / t_(r, enter);
        if (leave < 0 || ratio < best - kEps) {
          best = ratio;
          leave = r;
        } else if (ratio <= best + kEps && basis_[r] < basis_[leave]) {
          best = std::min(best, ratio);
          leave = r;
        }
      }
      if (leave < 0) return false;
      pivot(leave, enter);
      if (pivots_ > budget) throw NumericalError("simplex pivot budget exhausted");
    }
  }

private:
  Matrix t_;
  std::vector<int> basis_;
  int cols_;
  std::vector<bool> active_;
  long pivots_ = 0;
};

}  // namespace

LpSolution solve(const LinearProgram& program) {
  const int m = static_cast<int>(program.constraints.rows());
  const int n = static_cast<int>(program.constraints.cols());
  if (program.objective.size() != n || program.rhs.size() != m ||
      static_cast<int>(program.senses.size()) != m)
    throw std::invalid_argument("linear program dimensions disagree");

  // Normalize to non-negative right-hand sides.
  Matrix a = program.constraints;
  Vector b = program.rhs;
  std::vector<Sense> senses = program.senses;
  for (int r = 0; r < m; ++r) {
    if (b(r) < 0.0) {
      a.row(r) *= -1.0;
      b(r) = -b(r);
      if (senses[r] == Sense::greater_equal) senses[r] = Sense::less_equal;
      else if (senses[r] == Sense::less_equal) senses[r] = Sense::greater_equal;
    }
  }

  int num_slack = 0;
  for (auto s : senses) num_slack += (s != Sense::equal);
  int num_artificial = 0;
  for (auto s : senses) num_artificial += (s != Sense::less_equal);
  const int slack0 = n;
  const int art0 = n + num_slack;
  const int cols = n + num_slack + num_artificial;

  Matrix body = Matrix::Zero(m + 1, cols + 1);
  std::vector<int> basis(m);
  int slack = slack0;
  int art = art0;
  for (int r = 0; r < m; ++r) {
    body.row(r).head(n) = a.row(r);
    body(r, cols) = b(r);
    if (senses[r] == Sense::less_equal) {
      body(r, slack) = 1.0;
      basis[r] = slack++;
    } else {
      if (senses[r] == Sense::greater_equal) body(r, slack++) = -1.0;
      body(r, art) = 1.0;
      basis[r] = art++;
    }
  }

  Tableau tab(std::move(body), std::move(basis), cols);
  const long budget = 50L * (m + cols) + 10000;

  Vector phase1 = Vector::Zero(cols);
  phase1.tail(num_artificial).setConstant(-1.0);
  tab.set_objective(phase1);
  std::vector<bool> all(cols, true);
  tab.optimize(all, budget);

  LpSolution out;
  out.artificial_mass = -tab.value();
  if (out.artificial_mass > Tolerances::lp_infeasible) {
    out.status = LpStatus::infeasible;
    out.pivots = tab.pivots();
    return out;
  }

  // Drive remaining artificials out of the basis; rows where that is
  // impossible are linear combinations of the others.
  for (int r = 0; r < m; ++r) {
    if (tab.basis()[r] < art0) continue;
    int enter = -1;
    for (int c = 0; c < art0; ++c) {
      if (std::abs(tab.entry(r, c)) > kEps) {
        enter = c;
        break;
      }
    }
    if (enter >= 0) tab.pivot(r, enter);
    else tab.drop_row(r);
  }

  Vector phase2 = Vector::Zero(cols);
  phase2.head(n) = program.objective;
  tab.set_objective(phase2);
  std::vector<bool> allowed(cols, true);
  for (int c = art0; c < cols; ++c) allowed[c] = false;
  const bool bounded = tab.optimize(allowed, budget);
  out.pivots = tab.pivots();
  if (!bounded) {
    out.status = LpStatus::unbounded;
    return out;
  }

  out.status = LpStatus::optimal;
  out.x = Vector::Zero(n);
  for (int r = 0; r < m; ++r) {
    if (!tab.active(r)) continue;
    const int c = tab.basis()[r];
    if (c < n) out.x(c) = std::max(0.0, tab.rhs(r));
  }
  out.objective = program.objective.dot(out.x);
  return out;
}

}  // namespace rescrl::lp
