#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

namespace rescrl {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/**
 * Tabular constrained MDP.
 *
 * Transitions are stored as a dense (S*A) x S matrix whose row `s*A + a` is
 * the next-state distribution P(.|s,a). Reward and utility tables are S x A.
 * `translated` holds g_i = u_i - (1-gamma) b_i and is derived from the
 * utilities and thresholds; use make_cmdp() to keep it in sync.
 */
struct Cmdp {
  int num_states = 0;
  int num_actions = 0;
  double gamma = 0.0;
  Vector rho;
  Matrix transitions;
  Matrix reward;
  std::vector<Matrix> utilities;
  std::vector<double> thresholds;
  std::vector<Matrix> translated;

  int num_constraints() const { return static_cast<int>(utilities.size()); }
  int row(int s, int a) const { return s * num_actions + a; }
  double horizon() const { return 1.0 / (1.0 - gamma); }
};

/// Lists every violated model invariant; an empty result means the model is valid.
std::vector<std::string> validate_cmdp(const Cmdp& model);

/// g_i(s,a) = u_i(s,a) - (1-gamma) b_i. Throws std::domain_error for thresholds
/// outside (0, 1/(1-gamma)] or a discount outside [0,1).
std::vector<Matrix> translate_constraints(const std::vector<Matrix>& utilities,
                                          const std::vector<double>& thresholds, double gamma);

/// Assembles a model, derives the translated utilities and validates it.
/// Throws ConfigError listing the violations when the result is invalid.
Cmdp make_cmdp(double gamma, Vector rho, Matrix transitions, Matrix reward,
               std::vector<Matrix> utilities, std::vector<double> thresholds);

/// Row-stochastic S x A action table.
class Policy {
public:
  /// Throws std::invalid_argument unless every row is a probability vector.
  explicit Policy(Matrix probs);

  static Policy uniform(int num_states, int num_actions);

  const Matrix& probs() const { return probs_; }
  double operator()(int s, int a) const { return probs_(s, a); }
  int num_states() const { return static_cast<int>(probs_.rows()); }
  int num_actions() const { return static_cast<int>(probs_.cols()); }

private:
  Matrix probs_;
};

/// Scalarized values for the reward r + lambda^T g.
struct ScalarizedValues {
  Vector v;
  Matrix q;
  double v_rho = 0.0;
};

struct ValueBundle {
  Vector v_reward;
  Matrix q_reward;
  Matrix adv_reward;
  std::vector<Vector> v_utils;
  std::vector<Matrix> q_utils;
  double v_reward_rho = 0.0;
  Vector v_utils_rho;
  std::optional<ScalarizedValues> scalarized;
};

/**
 * LU factorization of (I - gamma P^pi) for one (model, policy) pair.
 *
 * Every value table for that policy is one back-substitution away, so
 * callers needing several cost tables should reuse one evaluator. The model
 * must outlive the evaluator.
 */
class PolicyEvaluator {
public:
  PolicyEvaluator(const Cmdp& model, const Policy& policy);

  /// Per-state values V^pi for the S x A cost table. Throws NumericalError
  /// when the residual exceeds the solve tolerance.
  Vector values(const Matrix& cost) const;

  /// Q^pi(s,a) = c(s,a) + gamma sum_s' P(s'|s,a) V(s').
  Matrix q_values(const Matrix& cost, const Vector& values) const;

  /// Normalized discounted state visitation d_rho^pi.
  Vector visitation() const;

private:
  const Cmdp& model_;
  Matrix probs_;
  Matrix system_;
  Eigen::PartialPivLU<Matrix> lu_;
};

ValueBundle evaluate_policy(const Cmdp& model, const Policy& policy);

/// Same as above, plus the scalarized values for r + weights^T g.
ValueBundle evaluate_policy(const Cmdp& model, const Policy& policy, const Vector& weights);

/// d_rho^pi = (1-gamma) rho^T (I - gamma P^pi)^{-1}.
Vector visitation(const Cmdp& model, const Policy& policy);

/// Euclidean projection onto the probability simplex (sort and threshold).
/// Throws std::domain_error on an empty input.
Vector project_simplex(const Eigen::Ref<const Vector>& v);

/// Deterministic policy on argmax_a q(s,a), ties to the lowest action index.
Policy greedy_policy(const Matrix& q);

}  // namespace rescrl
