#include "rescrl/oracle.hpp"

#include "rescrl/errors.hpp"
#include "rescrl/line_search.hpp"
#include "rescrl/simplex.hpp"
#include "rescrl/tolerances.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace rescrl {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

Matrix scalarized_reward(const Cmdp& model, const Vector& lam) {
  if (lam.size() != model.num_constraints())
    throw std::invalid_argument("multiplier length differs from the number of constraints");
  Matrix reward = model.reward;
  for (int i = 0; i < model.num_constraints(); ++i) reward += lam(i) * model.translated[i];
  return reward;
}

}  // namespace

MdpSolution solve_mdp(const Cmdp& model, const Matrix& reward) {
  const int S = model.num_states;
  const int A = model.num_actions;
  Vector v = Vector::Zero(S);
  Matrix q(S, A);
  const long max_iterations = 1'000'000;
  for (long it = 0;; ++it) {
    const Vector next = model.transitions * v;
    for (int s = 0; s < S; ++s)
      for (int a = 0; a < A; ++a) q(s, a) = reward(s, a) + model.gamma * next(model.row(s, a));
    const Vector updated = q.rowwise().maxCoeff();
    const double residual = (updated - v).cwiseAbs().maxCoeff();
    v = updated;
    if (residual <= Tolerances::value_iteration) break;
    if (it >= max_iterations) throw NumericalError("value iteration did not converge");
  }
  // Q from the converged V so the greedy choice is consistent with it.
  const Vector next = model.transitions * v;
  for (int s = 0; s < S; ++s)
    for (int a = 0; a < A; ++a) q(s, a) = reward(s, a) + model.gamma * next(model.row(s, a));
  Policy policy = greedy_policy(q);

  const Vector exact = PolicyEvaluator(model, policy).values(reward);
  const double scale = std::max(1.0, reward.cwiseAbs().maxCoeff());
  const double mismatch = std::abs(model.rho.dot(exact) - model.rho.dot(v));
  if (mismatch > Tolerances::solve_residual * scale) {
    std::ostringstream os;
    os << "greedy policy value differs from value iteration by " << mismatch;
    throw NumericalError(os.str());
  }
  return MdpSolution{model.rho.dot(v), std::move(v), std::move(policy)};
}

MdpSolution solve_scalarized_mdp(const Cmdp& model, const Vector& lam) {
  if (lam.size() > 0 && lam.minCoeff() < 0.0)
    throw std::invalid_argument("multipliers must be non-negative");
  return solve_mdp(model, scalarized_reward(model, lam));
}

OccupancyResult solve_occupancy_lp(const Cmdp& model, const Vector& xi) {
  const int S = model.num_states;
  const int A = model.num_actions;
  const int m = model.num_constraints();
  if (xi.size() != m) throw std::invalid_argument("relaxation length differs from m");
  const int n = S * A;
  const double scale = 1.0 - model.gamma;

  lp::LinearProgram program;
  program.objective.resize(n);
  program.constraints = Matrix::Zero(S + m, n);
  program.rhs.resize(S + m);
  program.senses.assign(S, lp::Sense::equal);
  program.senses.resize(S + m, lp::Sense::greater_equal);
  for (int s = 0; s < S; ++s) {
    for (int a = 0; a < A; ++a) {
      const int col = model.row(s, a);
      program.objective(col) = model.reward(s, a);
      program.constraints(s, col) += 1.0;
      for (int next = 0; next < S; ++next)
        program.constraints(next, col) -= model.gamma * model.transitions(col, next);
      for (int i = 0; i < m; ++i) program.constraints(S + i, col) = model.translated[i](s, a);
    }
    program.rhs(s) = scale * model.rho(s);
  }
  for (int i = 0; i < m; ++i) program.rhs(S + i) = scale * xi(i);

  const auto solution = lp::solve(program);
  OccupancyResult out;
  out.artificial_mass = solution.artificial_mass;
  if (solution.status == lp::LpStatus::infeasible) {
    out.feasible = false;
    out.value = kNegInf;
    return out;
  }
  if (solution.status != lp::LpStatus::optimal)
    throw NumericalError("occupancy LP reported " + lp::to_string(solution.status));

  out.feasible = true;
  out.value = solution.objective / scale;
  out.occupancy = Matrix(S, A);
  Matrix probs(S, A);
  for (int s = 0; s < S; ++s) {
    for (int a = 0; a < A; ++a) out.occupancy(s, a) = solution.x(model.row(s, a));
    const double mass = out.occupancy.row(s).sum();
    if (mass < Tolerances::lp_zero_row) probs.row(s).setConstant(1.0 / A);
    else probs.row(s) = out.occupancy.row(s) / mass;
  }
  out.policy = Policy(std::move(probs));

  const auto check = evaluate_policy(model, *out.policy);
  std::ostringstream diag;
  diag.precision(12);
  if (std::abs(check.v_reward_rho - out.value) > Tolerances::lp_recovery)
    diag << " recovered policy value " << check.v_reward_rho << " vs LP " << out.value << ";";
  for (int i = 0; i < m; ++i) {
    if (check.v_utils_rho(i) < xi(i) - Tolerances::lp_recovery)
      diag << " constraint " << i << " value " << check.v_utils_rho(i) << " below " << xi(i) << ";";
  }
  if (!diag.str().empty())
    throw NumericalError("occupancy LP recovery failed (pivots " +
                         std::to_string(solution.pivots) + "):" + diag.str());
  return out;
}

std::vector<PrimalValuePoint> primal_value_map(const Cmdp& model, const std::vector<Vector>& grid) {
  std::vector<PrimalValuePoint> out;
  out.reserve(grid.size());
  for (const auto& xi : grid) {
    const auto lp = solve_occupancy_lp(model, xi);
    out.push_back({xi, lp.feasible, lp.value});
  }
  return out;
}

std::vector<double> linspace(double lo, double hi, int points) {
  if (points < 1) throw std::invalid_argument("linspace needs at least one point");
  if (points == 1) return {0.5 * (lo + hi)};
  std::vector<double> out(points);
  for (int k = 0; k < points; ++k) out[k] = lo + (hi - lo) * k / (points - 1);
  out.back() = hi;
  return out;
}

std::vector<Vector> box_grid(int m, double lo, double hi, int points) {
  std::vector<Vector> out;
  if (m == 0) {
    out.emplace_back(0);
    return out;
  }
  const auto axis = linspace(lo, hi, points);
  std::vector<int> idx(m, 0);
  for (;;) {
    Vector p(m);
    for (int i = 0; i < m; ++i) p(i) = axis[idx[i]];
    out.push_back(std::move(p));
    int i = m - 1;
    while (i >= 0 && ++idx[i] == points) idx[i--] = 0;
    if (i < 0) break;
  }
  return out;
}

double dual_regularized(const Cmdp& model, const CostFunction& cost, const Vector& lam, double lo,
                        double hi) {
  const double d = solve_scalarized_mdp(model, lam).value;
  const Vector xi = cost.conjugate_argmax(lam, lo, hi);
  return d - cost.value(xi) - lam.dot(xi);
}

double dual_regularized(const Cmdp& model, const CostFunction& cost, const Vector& lam) {
  return dual_regularized(model, cost, lam, -model.horizon(), model.horizon());
}

namespace {

struct BoxMinimum {
  Vector x;
  double value = 0.0;
};

/**
 * Minimizes a convex function over [0, cap]^m. One coordinate uses golden
 * section; two coordinates nest it; more use projected subgradient steps
 * with the supplied subgradient oracle.
 */
BoxMinimum minimize_on_box(int m, double cap, const std::function<double(const Vector&)>& f,
                           const std::function<Vector(const Vector&)>& subgradient) {
  const double tol = 1e-10 * std::max(1.0, cap);
  if (m == 0) return {Vector(0), f(Vector(0))};
  if (m == 1) {
    const auto best = golden_section_minimize(
        [&](double x) { return f(Vector::Constant(1, x)); }, 0.0, cap, tol);
    return {Vector::Constant(1, best.x), best.value};
  }
  if (m == 2) {
    auto inner = [&](double x0) {
      return golden_section_minimize(
          [&](double x1) {
            Vector p(2);
            p << x0, x1;
            return f(p);
          },
          0.0, cap, tol);
    };
    const auto outer = golden_section_minimize([&](double x0) { return inner(x0).value; }, 0.0,
                                               cap, tol);
    const auto in = inner(outer.x);
    Vector p(2);
    p << outer.x, in.x;
    return {p, in.value};
  }
  Vector x = Vector::Zero(m);
  BoxMinimum best{x, f(x)};
  const int iterations = 4000;
  for (int k = 0; k < iterations; ++k) {
    const Vector g = subgradient(x);
    const double norm = g.norm();
    if (norm == 0.0) break;
    const double step = cap / (10.0 * std::sqrt(k + 1.0));
    x = (x - step * g / norm).cwiseMax(0.0).cwiseMin(cap);
    const double fx = f(x);
    if (fx < best.value) best = {x, fx};
  }
  return best;
}

bool at_cap(const Vector& lam, double cap) {
  for (Eigen::Index i = 0; i < lam.size(); ++i)
    if (lam(i) >= cap * (1.0 - 1e-6)) return true;
  return false;
}

}  // namespace

PerturbedDual minimize_perturbed_dual(const Cmdp& model, const Vector& xi, double cap) {
  const int m = model.num_constraints();
  if (xi.size() != m) throw std::invalid_argument("relaxation length differs from m");
  auto f = [&](const Vector& lam) { return solve_scalarized_mdp(model, lam).value - lam.dot(xi); };
  auto sub = [&](const Vector& lam) {
    const auto sol = solve_scalarized_mdp(model, lam);
    return Vector(evaluate_policy(model, sol.policy).v_utils_rho - xi);
  };
  const auto best = minimize_on_box(m, cap, f, sub);
  PerturbedDual out{best.value, best.x, true};

  // The dual is unbounded below exactly when some constraint cannot reach xi_i:
  // along lam_i -> infinity the slope of D(lam) - lam^T xi tends to
  // max_pi V_{g_i}^pi(rho) - xi_i.
  if (m == 1) {
    const double reach = solve_mdp(model, model.translated[0]).value;
    out.feasible = reach - xi(0) >= -1e-9;
  } else if (at_cap(best.x, cap)) {
    const Vector g = sub(best.x);
    for (int i = 0; i < m; ++i)
      if (best.x(i) >= cap * (1.0 - 1e-6) && g(i) < -1e-9) out.feasible = false;
  }
  if (!out.feasible) out.value = kNegInf;
  return out;
}

std::string to_string(OracleStatus status) {
  switch (status) {
    case OracleStatus::optimal: return "optimal";
    case OracleStatus::infeasible: return "infeasible";
    case OracleStatus::unbounded_dual_cap: return "unbounded-dual-cap";
  }
  return "unknown";
}

namespace {

struct PrimalSearch {
  bool feasible = false;
  Vector xi;
  double value = kNegInf;
};

PrimalSearch primal_grid_search(const Cmdp& model, const CostFunction& cost, double lo, double hi,
                                const RegularizedOptions& options) {
  const int m = model.num_constraints();
  auto objective = [&](const Vector& xi) {
    const auto lp = solve_occupancy_lp(model, xi);
    return lp.feasible ? lp.value - cost.value(xi) : kNegInf;
  };
  PrimalSearch best;
  auto consider = [&](const Vector& xi) {
    const double v = objective(xi);
    if (v > best.value) {
      best.value = v;
      best.xi = xi;
      best.feasible = true;
    }
  };
  for (const auto& xi : box_grid(m, lo, hi, options.grid_resolution)) consider(xi);
  if (!best.feasible || m == 0) return best;

  double spacing = options.grid_resolution > 1 ? (hi - lo) / (options.grid_resolution - 1) : 0.0;
  const int half = static_cast<int>(std::lround(options.refine_factor));
  for (int round = 0; round < options.refine_rounds && spacing > 0.0; ++round) {
    const double fine = spacing / options.refine_factor;
    const Vector center = best.xi;
    const auto offsets = box_grid(m, -half * fine, half * fine, 2 * half + 1);
    for (const auto& off : offsets) {
      const Vector xi = (center + off).cwiseMax(lo).cwiseMin(hi);
      consider(xi);
    }
    spacing = fine;
  }

  if (options.polish && spacing > 0.0) {
    const Vector center = best.xi;
    auto neg = [&](const Vector& xi) { return -objective(xi); };
    const double tol = 1e-9;
    auto lo_of = [&](int i) { return std::max(lo, center(i) - spacing); };
    auto hi_of = [&](int i) { return std::min(hi, center(i) + spacing); };
    if (m == 1) {
      const auto r = golden_section_minimize(
          [&](double x) { return neg(Vector::Constant(1, x)); }, lo_of(0), hi_of(0), tol);
      consider(Vector::Constant(1, r.x));
    } else if (m == 2) {
      auto inner = [&](double x0) {
        return golden_section_minimize(
            [&](double x1) {
              Vector p(2);
              p << x0, x1;
              return neg(p);
            },
            lo_of(1), hi_of(1), tol);
      };
      const auto outer = golden_section_minimize([&](double x0) { return inner(x0).value; },
                                                 lo_of(0), hi_of(0), tol);
      Vector p(2);
      p << outer.x, inner(outer.x).x;
      consider(p);
    }
  }
  return best;
}

}  // namespace

OracleReport solve_regularized(const Cmdp& model, const CostFunction& cost,
                               const RegularizedOptions& options) {
  const int m = model.num_constraints();
  if (m > 2) throw std::domain_error("the primal grid path supports at most two constraints");
  if (options.grid_resolution < 2) throw std::invalid_argument("grid resolution must be >= 2");
  const double lo = options.xi_lo.value_or(-model.horizon());
  const double hi = options.xi_hi.value_or(model.horizon());
  if (!(lo <= hi)) throw std::invalid_argument("empty relaxation box");

  OracleReport report;
  report.grid_resolution = options.grid_resolution;

  auto dual = [&](const Vector& lam) { return dual_regularized(model, cost, lam, lo, hi); };
  auto dual_sub = [&](const Vector& lam) {
    const auto sol = solve_scalarized_mdp(model, lam);
    const Vector xi = cost.conjugate_argmax(lam, lo, hi);
    return Vector(evaluate_policy(model, sol.policy).v_utils_rho - xi);
  };
  const auto dual_min = minimize_on_box(m, options.lambda_cap, dual, dual_sub);
  report.dual_value = dual_min.value;
  report.lambda_star = dual_min.x;

  const auto primal = primal_grid_search(model, cost, lo, hi, options);
  if (!primal.feasible) {
    report.status = OracleStatus::infeasible;
    report.primal_value = kNegInf;
    report.xi_star = Vector(0);
    report.duality_gap = std::numeric_limits<double>::infinity();
    return report;
  }
  report.primal_value = primal.value;
  report.xi_star = primal.xi;
  report.policy = solve_occupancy_lp(model, primal.xi).policy;
  report.duality_gap = std::abs(report.dual_value - report.primal_value);

  if (at_cap(report.lambda_star, options.lambda_cap)) {
    report.status = OracleStatus::unbounded_dual_cap;
  } else if (report.duality_gap > Tolerances::duality_failure) {
    std::ostringstream os;
    os.precision(10);
    os << "primal grid value " << report.primal_value << " and dual value " << report.dual_value
       << " disagree by " << report.duality_gap
       << " (grid too coarse or multiplier cap too small)";
    throw NumericalError(os.str());
  } else {
    report.status = OracleStatus::optimal;
  }
  return report;
}

EquilibriumResidual equilibrium_residual(const Cmdp& model, const CostFunction& cost,
                                         const Vector& xi, double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("finite-difference step must be positive");
  const int m = model.num_constraints();
  const auto center = solve_occupancy_lp(model, xi);
  if (!center.feasible) throw std::domain_error("V*(xi) is infeasible at the stencil center");
  const double bound = model.horizon();
  auto side = [&](const Vector& p) -> std::optional<double> {
    if (p.cwiseAbs().maxCoeff() > bound) return std::nullopt;
    const auto lp = solve_occupancy_lp(model, p);
    if (!lp.feasible) return std::nullopt;
    return lp.value;
  };
  const Vector grad = cost.gradient(xi);
  EquilibriumResidual out{Vector(m), std::vector<bool>(m, false)};
  for (int i = 0; i < m; ++i) {
    Vector plus = xi;
    Vector minus = xi;
    plus(i) += delta;
    minus(i) -= delta;
    const auto vp = side(plus);
    const auto vm = side(minus);
    double slope = 0.0;
    if (vp && vm) {
      slope = (*vp - *vm) / (2.0 * delta);
    } else {
      out.one_sided[i] = true;
      if (vp) slope = (*vp - center.value) / delta;
      else if (vm) slope = (center.value - *vm) / delta;
    }
    out.residual(i) = slope - grad(i);
  }
  return out;
}

}  // namespace rescrl
