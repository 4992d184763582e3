#pragma once

namespace rescrl {

/// Numerical slack shared by solvers and tests.
struct Tolerances {
  /// Row sums of transitions and rho.
  static constexpr double model_sum = 1e-12;
  /// Policy rows and visitation weights.
  static constexpr double invariant_slack = 1e-10;
  /// Max residual of (I - gamma P^pi) V = c^pi after the dense solve.
  static constexpr double solve_residual = 1e-8;
  /// Bellman residual at which value iteration stops.
  static constexpr double value_iteration = 1e-10;
  /// Positive artificial mass above this ends phase one as infeasible.
  static constexpr double lp_infeasible = 1e-8;
  /// Pivot magnitude below this counts as zero in the simplex tableau.
  static constexpr double lp_pivot = 1e-9;
  /// Recovered LP policy vs. LP objective / constraint slack.
  static constexpr double lp_recovery = 1e-6;
  /// Below this a q row is treated as unreachable and gets a uniform policy row.
  static constexpr double lp_zero_row = 1e-12;
  /// Primal/dual oracle agreement that counts as optimal.
  static constexpr double duality_agreement = 1e-3;
  /// Primal/dual oracle disagreement that raises.
  static constexpr double duality_failure = 1e-2;
};

}  // namespace rescrl
