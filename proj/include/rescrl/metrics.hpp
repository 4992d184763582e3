#pragma once

#include "rescrl/algorithms.hpp"

#include <optional>
#include <span>
#include <vector>

namespace rescrl {

struct Regrets {
  double opt = 0.0;
  double vio = 0.0;
};

/**
 * R_opt = mean_t (V_h* - (V_r^{pi_t} - h(xi_t))) and
 * R_vio = sum_i [mean_t (xi_{i,t} - V_{g_i}^{pi_t})]_+ over the given records.
 * Throws ConfigError without an oracle value or records.
 */
Regrets compute_regrets(std::span<const TraceRecord> records, std::optional<double> v_h_star);

/// Exact regrets from the online sums of run_algorithm (every step, not just traced ones).
Regrets compute_regrets(const RunningSums& sums, std::optional<double> v_h_star);

struct Violations {
  /// [xi_i - V_{g_i}^pi(rho)]_+
  Vector deficit;
  /// xi_i - V_{g_i}^pi(rho)
  Vector raw;
};

Violations compute_violations(const Cmdp& model, const Policy& policy, const Vector& xi);

struct Oscillation {
  std::vector<double> xi;
  double v_r = 0.0;
};

/// max - min of each xi_i series and of V_r over the final `window` records.
/// Throws std::invalid_argument if window is 0 or exceeds the trace length.
Oscillation oscillation_stat(const Trace& trace, std::size_t window);

struct MetricsReport {
  std::optional<double> v_h_star;
  std::optional<double> regret_opt;
  double regret_vio = 0.0;
  std::optional<double> final_gap;
  Vector violations;
  double tightness = 0.0;
  Oscillation oscillation;
  double policy_drift = 0.0;
  double final_v_r = 0.0;
  Vector final_xi;
  Vector final_lam;
  /// ||grad h(xi_T) + lam_T||_inf
  double stationarity = 0.0;
};

/// Assembles the report for a finished run; the oscillation window is clamped to the trace length.
MetricsReport summarize_run(const Cmdp& model, const CostFunction& cost, const Trace& trace,
                            std::optional<double> v_h_star, std::size_t oscillation_window = 200);

}  // namespace rescrl
