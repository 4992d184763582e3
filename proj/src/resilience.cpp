#include "rescrl/resilience.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rescrl {

QuadraticCost::QuadraticCost(double alpha) : alpha_(alpha) {
  if (!(std::isfinite(alpha) && alpha >= 0.0))
    throw std::invalid_argument("quadratic cost needs a finite alpha >= 0");
}

double QuadraticCost::value(const Vector& xi) const { return alpha_ * xi.squaredNorm(); }

Vector QuadraticCost::gradient(const Vector& xi) const { return 2.0 * alpha_ * xi; }

Vector QuadraticCost::conjugate_argmax(const Vector& lam, double lo, double hi) const {
  Vector xi(lam.size());
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    if (alpha_ > 0.0) {
      xi(i) = std::clamp(-lam(i) / (2.0 * alpha_), lo, hi);
    } else {
      // Linear objective -lam_i xi_i: lower corner for lam_i > 0, upper for lam_i < 0.
      xi(i) = lam(i) > 0.0 ? lo : (lam(i) < 0.0 ? hi : std::clamp(0.0, lo, hi));
    }
  }
  return xi;
}

CostEval cost_eval(const CostFunction& cost, const Vector& xi) {
  return {cost.value(xi), cost.gradient(xi)};
}

Vector project_relaxation(const Vector& xi, double gamma) {
  const double bound = 1.0 / (1.0 - gamma);
  return xi.cwiseMax(-bound).cwiseMin(bound);
}

MultiplierDomain::MultiplierDomain(double cap) : cap_(cap) {
  if (!(std::isfinite(cap) && cap > 0.0))
    throw std::invalid_argument("multiplier cap must be positive and finite");
}

Vector project_multiplier(const Vector& lam, const MultiplierDomain& domain) {
  return lam.cwiseMax(0.0).cwiseMin(domain.cap());
}

double lagrangian(const Cmdp& model, const Policy& policy, const Vector& xi, const Vector& lam,
                  const CostFunction& cost) {
  const auto values = evaluate_policy(model, policy, lam);
  return values.scalarized->v_rho - cost.value(xi) - lam.dot(xi);
}

}  // namespace rescrl
