#pragma once

#include "rescrl/cmdp.hpp"
#include "rescrl/resilience.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rescrl {

enum class Algorithm {
  respgpd,   ///< simultaneous projected primal-dual steps
  resopgpd,  ///< optimistic (predictor/corrector) variant
  baseline,  ///< resopgpd with the relaxation pinned at zero
};

std::string to_string(Algorithm algorithm);
/// Throws ConfigError on an unknown name.
Algorithm parse_algorithm(std::string_view name);

struct AlgoConfig {
  Algorithm algorithm = Algorithm::resopgpd;
  double eta = 0.1;
  long horizon = 1000;
  double lambda_cap = kDefaultMultiplierCap;
  std::shared_ptr<const CostFunction> cost = std::make_shared<QuadraticCost>(1.0);
  long trace_every = 1;
  std::uint64_t seed = 0;

  /// Throws ConfigError naming the first invalid field.
  void validate() const;
};

/// One primal-dual point (pi, xi, lambda).
struct Iterate {
  Policy policy;
  Vector xi;
  Vector lam;
};

/**
 * Solver state. `current` is the iterate the solver reports; the optimistic
 * method also carries the anchor point its proximal steps start from.
 */
struct ResilientIterate {
  Iterate current;
  std::optional<Iterate> anchor;

  /// Uniform policy, zero relaxation and multipliers; anchor equal to the iterate when requested.
  static ResilientIterate initial(const Cmdp& model, bool with_anchor);
};

/// Everything a proximal step needs from one point, plus the traced quantities.
struct PointEval {
  double v_r = 0.0;
  Vector v_g;
  double h = 0.0;
  double lagrangian = 0.0;
  /// Q_{r + lam^T g}^pi, the policy ascent direction.
  Matrix q_lagrangian;
  /// -grad h(xi) - lam, the relaxation ascent direction.
  Vector xi_ascent;
  /// V_g^pi(rho) - xi; the multiplier moves against it.
  Vector lam_descent;
};

PointEval evaluate_point(const Cmdp& model, const CostFunction& cost, const Iterate& point);

/**
 * Closed form of the three proximal updates: each is a Euclidean projection
 * of `from` moved by eta along the directions in `at`. With `freeze_xi` the
 * relaxation is copied unchanged.
 */
Iterate proximal_step(const Iterate& from, const PointEval& at, double eta, double gamma,
                      const MultiplierDomain& domain, bool freeze_xi = false);

/// One simultaneous step, all directions taken at the pre-update iterate.
ResilientIterate respgpd_step(const Cmdp& model, const CostFunction& cost,
                              const ResilientIterate& state, double eta,
                              const MultiplierDomain& domain);

/**
 * One optimistic step. The new iterate steps from the anchor along the
 * directions at the previous iterate; the anchor then steps from itself
 * along the directions at the new iterate.
 */
ResilientIterate resopgpd_step(const Cmdp& model, const CostFunction& cost,
                               const ResilientIterate& state, double eta,
                               const MultiplierDomain& domain, bool freeze_xi = false);

struct TraceRecord {
  long iter = 0;
  double v_r = 0.0;
  Vector v_g;
  Vector xi;
  Vector lam;
  double h = 0.0;
  double lagrangian = 0.0;
  /// [xi_i - V_{g_i}(rho)]_+
  Vector violation;
};

/// Sums over the iterates t = 0..T-1, accumulated every step regardless of subsampling.
struct RunningSums {
  long count = 0;
  double regularized_value = 0.0;  ///< sum of V_r - h(xi)
  Vector slack_deficit;            ///< per constraint, sum of xi_i - V_{g_i}
};

struct Trace {
  int num_constraints = 0;
  std::vector<TraceRecord> records;
  ResilientIterate final_state;
  RunningSums sums;
  /// Frobenius norm of the last change of the reported policy (anchor for resopgpd).
  double final_policy_drift = 0.0;
  /// Largest sup-norm step of (pi, xi, lam) over the final 100 iterations.
  double tail_motion = 0.0;
};

/// Runs `config.horizon` steps from the standard initialization. Deterministic.
Trace run_algorithm(const Cmdp& model, const AlgoConfig& config);

}  // namespace rescrl
