#pragma once

#include "rescrl/cmdp.hpp"

#include <string>
#include <vector>

namespace rescrl::lp {

enum class Sense { equal, greater_equal, less_equal };

/// maximize objective^T x  s.t.  constraints x (sense) rhs,  x >= 0.
struct LinearProgram {
  Vector objective;
  Matrix constraints;
  Vector rhs;
  std::vector<Sense> senses;
};

enum class LpStatus { optimal, infeasible, unbounded };

std::string to_string(LpStatus status);

struct LpSolution {
  LpStatus status = LpStatus::infeasible;
  Vector x;
  double objective = 0.0;
  /// Artificial mass left after phase one (0 when feasible).
  double artificial_mass = 0.0;
  long pivots = 0;
};

/**
 * Dense two-phase tableau simplex with Bland's rule.
 *
 * Phase one minimizes the sum of artificials; a residual above
 * Tolerances::lp_infeasible reports infeasibility. Artificials still basic
 * after phase one are pivoted out or their (redundant) rows dropped.
 * Throws NumericalError if the pivot budget runs out.
 */
LpSolution solve(const LinearProgram& program);

}  // namespace rescrl::lp
