#pragma once

// Test-side oracles. Nothing here calls the library's solvers, so results
// computed with these helpers are independent references.

#include "rescrl/cmdp.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <vector>

namespace testing_support {

using rescrl::Cmdp;
using rescrl::Matrix;
using rescrl::Policy;
using rescrl::Vector;

/// V = c^pi + gamma P^pi V by repeated application of the Bellman operator.
inline std::vector<double> power_iteration_values(const Cmdp& m, const Matrix& pi,
                                                  const Matrix& cost, int sweeps = 10000) {
  const int S = m.num_states;
  const int A = m.num_actions;
  std::vector<double> v(S, 0.0);
  std::vector<double> next(S, 0.0);
  for (int k = 0; k < sweeps; ++k) {
    for (int s = 0; s < S; ++s) {
      double acc = 0.0;
      for (int a = 0; a < A; ++a) {
        double cont = 0.0;
        for (int t = 0; t < S; ++t) cont += m.transitions(s * A + a, t) * v[t];
        acc += pi(s, a) * (cost(s, a) + m.gamma * cont);
      }
      next[s] = acc;
    }
    v.swap(next);
  }
  return v;
}

inline double dot_rho(const Cmdp& m, const std::vector<double>& v) {
  double acc = 0.0;
  for (int s = 0; s < m.num_states; ++s) acc += m.rho(s) * v[s];
  return acc;
}

/// Every deterministic policy of the model, as action index per state.
inline std::vector<std::vector<int>> deterministic_policies(int S, int A) {
  std::vector<std::vector<int>> out;
  std::vector<int> choice(S, 0);
  for (;;) {
    out.push_back(choice);
    int s = 0;
    while (s < S && ++choice[s] == A) choice[s++] = 0;
    if (s == S) break;
  }
  return out;
}

inline Matrix one_hot(const std::vector<int>& actions, int A) {
  Matrix p = Matrix::Zero(static_cast<int>(actions.size()), A);
  for (std::size_t s = 0; s < actions.size(); ++s) p(static_cast<int>(s), actions[s]) = 1.0;
  return p;
}

/// Best V_c(rho) over deterministic policies, by enumeration and power iteration.
inline double enumerate_best_value(const Cmdp& m, const Matrix& cost) {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& d : deterministic_policies(m.num_states, m.num_actions)) {
    const auto v = power_iteration_values(m, one_hot(d, m.num_actions), cost, 3000);
    best = std::max(best, dot_rho(m, v));
  }
  return best;
}

inline Matrix random_policy(int S, int A, std::mt19937_64& eng) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  Matrix p(S, A);
  for (int s = 0; s < S; ++s) {
    for (int a = 0; a < A; ++a) p(s, a) = u(eng);
    p.row(s) /= p.row(s).sum();
  }
  return p;
}

/// Projection onto the 1-simplex in R^2 by scanning p in [0,1].
inline std::array<double, 2> grid_project_2(double x0, double x1, int points = 200001) {
  double best_p = 0.0;
  double best_d = std::numeric_limits<double>::infinity();
  for (int k = 0; k < points; ++k) {
    const double p = static_cast<double>(k) / (points - 1);
    const double d = (p - x0) * (p - x0) + (1.0 - p - x1) * (1.0 - p - x1);
    if (d < best_d) {
      best_d = d;
      best_p = p;
    }
  }
  return {best_p, 1.0 - best_p};
}

/// Projection onto the 2-simplex in R^3 by a triangular grid scan.
inline std::array<double, 3> grid_project_3(const std::array<double, 3>& x, int points = 1001) {
  std::array<double, 3> best{};
  double best_d = std::numeric_limits<double>::infinity();
  for (int i = 0; i < points; ++i) {
    for (int j = 0; i + j < points; ++j) {
      const double p0 = static_cast<double>(i) / (points - 1);
      const double p1 = static_cast<double>(j) / (points - 1);
      const double p2 = 1.0 - p0 - p1;
      const double d = (p0 - x[0]) * (p0 - x[0]) + (p1 - x[1]) * (p1 - x[1]) +
                       (p2 - x[2]) * (p2 - x[2]);
      if (d < best_d) {
        best_d = d;
        best = {p0, p1, p2};
      }
    }
  }
  return best;
}

/// One state, one action, self loop.
inline Cmdp single_state(double gamma, double r, std::vector<double> u = {},
                         std::vector<double> b = {}) {
  std::vector<Matrix> utils;
  for (double x : u) utils.push_back(Matrix::Constant(1, 1, x));
  return rescrl::make_cmdp(gamma, Vector::Ones(1), Matrix::Ones(1, 1), Matrix::Constant(1, 1, r),
                           utils, b);
}

/// Deterministic cycle s0 -> s1 -> s0 with a single action and r = (1, 0).
inline Cmdp two_state_cycle(double gamma, Vector rho) {
  Matrix T(2, 2);
  T << 0, 1, 1, 0;
  Matrix R(2, 1);
  R << 1, 0;
  return rescrl::make_cmdp(gamma, rho, T, R, {}, {});
}

// ---------------------------------------------------------------------------
// 2-state 2-action hand instance with one constraint, recomputed scalar by
// scalar: explicit 2x2 inverse, explicit 2-point simplex projection.

struct HandPoint {
  double pi[2][2];
  double xi;
  double lam;
};

struct HandInstance {
  double gamma = 0.5;
  double rho[2] = {0.6, 0.4};
  // P[s][a][s']
  double P[2][2][2] = {{{0.7, 0.3}, {0.2, 0.8}}, {{0.5, 0.5}, {0.9, 0.1}}};
  double r[2][2] = {{1.0, 0.2}, {0.0, 0.6}};
  double u[2][2] = {{0.1, 0.9}, {0.8, 0.3}};
  double b = 1.0;
  double alpha = 0.5;
  double cap = 100.0;

  double g(int s, int a) const { return u[s][a] - (1.0 - gamma) * b; }
  double horizon() const { return 1.0 / (1.0 - gamma); }

  Cmdp model() const {
    Matrix T(4, 2);
    Matrix R(2, 2);
    Matrix U(2, 2);
    for (int s = 0; s < 2; ++s) {
      for (int a = 0; a < 2; ++a) {
        T(s * 2 + a, 0) = P[s][a][0];
        T(s * 2 + a, 1) = P[s][a][1];
        R(s, a) = r[s][a];
        U(s, a) = u[s][a];
      }
    }
    Vector rh(2);
    rh << rho[0], rho[1];
    return rescrl::make_cmdp(gamma, rh, T, R, {U}, {b});
  }

  /// V for cost c under pi via the explicit inverse of I - gamma P^pi.
  void values(const double pi[2][2], const std::function<double(int, int)>& c,
              double v[2]) const {
    double pp[2][2];
    double cp[2];
    for (int s = 0; s < 2; ++s) {
      cp[s] = pi[s][0] * c(s, 0) + pi[s][1] * c(s, 1);
      for (int t = 0; t < 2; ++t) pp[s][t] = pi[s][0] * P[s][0][t] + pi[s][1] * P[s][1][t];
    }
    const double m00 = 1.0 - gamma * pp[0][0];
    const double m01 = -gamma * pp[0][1];
    const double m10 = -gamma * pp[1][0];
    const double m11 = 1.0 - gamma * pp[1][1];
    const double det = m00 * m11 - m01 * m10;
    v[0] = (m11 * cp[0] - m01 * cp[1]) / det;
    v[1] = (-m10 * cp[0] + m00 * cp[1]) / det;
  }

  double q(const std::function<double(int, int)>& c, const double v[2], int s, int a) const {
    return c(s, a) + gamma * (P[s][a][0] * v[0] + P[s][a][1] * v[1]);
  }

  static double clamp(double x, double lo, double hi) { return x < lo ? lo : (x > hi ? hi : x); }

  struct Grad {
    double q[2][2];     // Q_{r + lam g}
    double xi_ascent;   // -2 alpha xi - lam
    double lam_descent; // V_g(rho) - xi
  };

  Grad gradients(const HandPoint& p) const {
    auto scal = [&](int s, int a) { return r[s][a] + p.lam * g(s, a); };
    auto gc = [&](int s, int a) { return g(s, a); };
    double vl[2];
    double vg[2];
    values(p.pi, scal, vl);
    values(p.pi, gc, vg);
    Grad out{};
    for (int s = 0; s < 2; ++s)
      for (int a = 0; a < 2; ++a) out.q[s][a] = q(scal, vl, s, a);
    out.xi_ascent = -2.0 * alpha * p.xi - p.lam;
    out.lam_descent = rho[0] * vg[0] + rho[1] * vg[1] - p.xi;
    return out;
  }

  HandPoint step(const HandPoint& from, const Grad& at, double eta) const {
    HandPoint out{};
    for (int s = 0; s < 2; ++s) {
      const double x0 = from.pi[s][0] + eta * at.q[s][0];
      const double x1 = from.pi[s][1] + eta * at.q[s][1];
      out.pi[s][0] = clamp(0.5 * (1.0 + x0 - x1), 0.0, 1.0);
      out.pi[s][1] = 1.0 - out.pi[s][0];
    }
    out.xi = clamp(from.xi + eta * at.xi_ascent, -horizon(), horizon());
    out.lam = clamp(from.lam - eta * at.lam_descent, 0.0, cap);
    return out;
  }
};

inline HandPoint hand_start() { return HandPoint{{{0.3, 0.7}, {0.6, 0.4}}, 0.4, 0.8}; }
inline HandPoint hand_anchor() { return HandPoint{{{0.5, 0.5}, {0.9, 0.1}}, -0.3, 1.5}; }

inline Matrix to_matrix(const HandPoint& p) {
  Matrix m(2, 2);
  m << p.pi[0][0], p.pi[0][1], p.pi[1][0], p.pi[1][1];
  return m;
}

}  // namespace testing_support
