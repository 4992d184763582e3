#pragma once

#include "rescrl/cmdp.hpp"

#include <memory>
#include <string>

namespace rescrl {

/**
 * Convex relaxation cost h(xi) with h(0) = 0.
 *
 * Solvers only see the value, the gradient and the two curvature constants,
 * so further kinds can be added by implementing this interface.
 */
class CostFunction {
public:
  virtual ~CostFunction() = default;

  virtual std::string kind() const = 0;
  virtual double value(const Vector& xi) const = 0;
  virtual Vector gradient(const Vector& xi) const = 0;
  /// Lipschitz constant of the gradient.
  virtual double gradient_lipschitz() const = 0;
  /// Strong-convexity modulus (0 when merely convex).
  virtual double strong_convexity() const = 0;

  /// argmax over xi in [lo, hi]^m of -h(xi) - lam^T xi, per coordinate.
  virtual Vector conjugate_argmax(const Vector& lam, double lo, double hi) const = 0;
};

/// h(xi) = alpha * ||xi||^2.
class QuadraticCost final : public CostFunction {
public:
  /// Throws std::invalid_argument for negative or non-finite alpha.
  explicit QuadraticCost(double alpha);

  double alpha() const { return alpha_; }

  std::string kind() const override { return "quadratic"; }
  double value(const Vector& xi) const override;
  Vector gradient(const Vector& xi) const override;
  double gradient_lipschitz() const override { return 2.0 * alpha_; }
  double strong_convexity() const override { return 2.0 * alpha_; }
  Vector conjugate_argmax(const Vector& lam, double lo, double hi) const override;

private:
  double alpha_;
};

struct CostEval {
  double value = 0.0;
  Vector gradient;
};

CostEval cost_eval(const CostFunction& cost, const Vector& xi);

/// Clamp each coordinate to [-1/(1-gamma), 1/(1-gamma)].
Vector project_relaxation(const Vector& xi, double gamma);

/// Per-coordinate multiplier box [0, cap].
class MultiplierDomain {
public:
  /// Throws std::invalid_argument unless cap is positive and finite.
  explicit MultiplierDomain(double cap);
  double cap() const { return cap_; }

private:
  double cap_;
};

inline constexpr double kDefaultMultiplierCap = 100.0;

Vector project_multiplier(const Vector& lam, const MultiplierDomain& domain);

/// L_h(pi, xi; lam) = V_{r + lam^T g}^pi(rho) - h(xi) - lam^T xi, evaluated exactly.
double lagrangian(const Cmdp& model, const Policy& policy, const Vector& xi, const Vector& lam,
                  const CostFunction& cost);

}  // namespace rescrl
