#pragma once

#include "rescrl/cmdp.hpp"
#include "rescrl/resilience.hpp"

#include <optional>
#include <string>
#include <vector>

namespace rescrl {

struct MdpSolution {
  /// Optimal value at rho.
  double value = 0.0;
  Vector values;
  Policy policy;
};

/**
 * Unconstrained optimum for an arbitrary S x A reward by value iteration to
 * Tolerances::value_iteration, then greedy extraction. The greedy policy is
 * re-evaluated exactly and must reproduce the value (NumericalError otherwise).
 */
MdpSolution solve_mdp(const Cmdp& model, const Matrix& reward);

/// D(lam) = max_pi V_{r + lam^T g}^pi(rho) with its greedy maximizer.
MdpSolution solve_scalarized_mdp(const Cmdp& model, const Vector& lam);

struct OccupancyResult {
  bool feasible = false;
  /// V*(xi); -infinity when infeasible.
  double value = 0.0;
  /// Normalized occupancy q(s,a) (sums to 1); empty when infeasible.
  Matrix occupancy;
  std::optional<Policy> policy;
  double artificial_mass = 0.0;
};

/**
 * V*(xi) through the occupancy-measure LP
 *   max <r,q>/(1-gamma)  s.t. Bellman flow, <g_i,q> >= (1-gamma) xi_i, q >= 0.
 *
 * The recovered policy q(s,a)/sum_a q(s,a) (uniform on empty rows) is
 * re-evaluated; a mismatch with the LP value or constraint slack beyond
 * Tolerances::lp_recovery throws NumericalError.
 */
OccupancyResult solve_occupancy_lp(const Cmdp& model, const Vector& xi);

struct PrimalValuePoint {
  Vector xi;
  bool feasible = false;
  double value = 0.0;
};

std::vector<PrimalValuePoint> primal_value_map(const Cmdp& model, const std::vector<Vector>& grid);

/// Uniform 1-D grid of `points` values on [lo, hi].
std::vector<double> linspace(double lo, double hi, int points);

/// Tensor grid on [lo, hi]^m with `points` per coordinate (one empty point when m = 0).
std::vector<Vector> box_grid(int m, double lo, double hi, int points);

/// D_h(lam) = D(lam) + max_{xi in [lo,hi]^m} (-h(xi) - lam^T xi).
double dual_regularized(const Cmdp& model, const CostFunction& cost, const Vector& lam, double lo,
                        double hi);
/// Same with the full relaxation box |xi_i| <= 1/(1-gamma).
double dual_regularized(const Cmdp& model, const CostFunction& cost, const Vector& lam);

struct PerturbedDual {
  double value = 0.0;
  Vector lam;
  /// False when the dual decreases without bound, i.e. the primal at xi is infeasible.
  bool feasible = true;
};

/// min over lam in [0, cap]^m of D(lam) - lam^T xi, the dual route to V*(xi).
PerturbedDual minimize_perturbed_dual(const Cmdp& model, const Vector& xi, double cap = 1000.0);

enum class OracleStatus { optimal, infeasible, unbounded_dual_cap };

std::string to_string(OracleStatus status);

struct RegularizedOptions {
  int grid_resolution = 21;
  int refine_rounds = 3;
  double refine_factor = 5.0;
  /// Golden-section polish inside the final grid cell.
  bool polish = true;
  double lambda_cap = kDefaultMultiplierCap;
  /// Relaxation box; defaults to |xi_i| <= 1/(1-gamma).
  std::optional<double> xi_lo;
  std::optional<double> xi_hi;
};

struct OracleReport {
  OracleStatus status = OracleStatus::optimal;
  double primal_value = 0.0;
  double dual_value = 0.0;
  Vector xi_star;
  Vector lambda_star;
  int grid_resolution = 0;
  double duality_gap = 0.0;
  /// LP policy at xi_star (primal path); the dual path certifies values only.
  std::optional<Policy> policy;
};

/**
 * V_h* = max_xi { V*(xi) - h(xi) } computed twice: a primal grid search with
 * one LP per point (m <= 2), and a dual minimization of D_h over [0, cap]^m
 * (golden section for m = 1, nested golden section for m = 2, projected
 * subgradient beyond). Throws NumericalError when the two values differ by
 * more than Tolerances::duality_failure.
 */
OracleReport solve_regularized(const Cmdp& model, const CostFunction& cost,
                               const RegularizedOptions& options = {});

struct EquilibriumResidual {
  /// Finite-difference slope of V* minus grad h(xi), per coordinate.
  Vector residual;
  /// Coordinates where one side of the stencil was infeasible.
  std::vector<bool> one_sided;
};

/// Central differences of V* with step delta; throws std::domain_error if V*(xi) is infeasible.
EquilibriumResidual equilibrium_residual(const Cmdp& model, const CostFunction& cost,
                                         const Vector& xi, double delta = 1e-3);

}  // namespace rescrl
