#include "rescrl/metrics.hpp"

#include "rescrl/errors.hpp"

#include <algorithm>
#include <stdexcept>

namespace rescrl {

Regrets compute_regrets(std::span<const TraceRecord> records, std::optional<double> v_h_star) {
  if (!v_h_star) throw ConfigError("regrets need the oracle value V_h*");
  if (records.empty()) throw ConfigError("regrets need at least one trace record");
  const auto m = records.front().xi.size();
  double value = 0.0;
  Vector deficit = Vector::Zero(m);
  for (const auto& rec : records) {
    value += rec.v_r - rec.h;
    deficit += rec.xi - rec.v_g;
  }
  const double n = static_cast<double>(records.size());
  return {*v_h_star - value / n, (deficit / n).cwiseMax(0.0).sum()};
}

Regrets compute_regrets(const RunningSums& sums, std::optional<double> v_h_star) {
  if (!v_h_star) throw ConfigError("regrets need the oracle value V_h*");
  if (sums.count < 1) throw ConfigError("regrets need at least one iterate");
  const double n = static_cast<double>(sums.count);
  return {*v_h_star - sums.regularized_value / n, (sums.slack_deficit / n).cwiseMax(0.0).sum()};
}

Violations compute_violations(const Cmdp& model, const Policy& policy, const Vector& xi) {
  const Vector v_g = evaluate_policy(model, policy).v_utils_rho;
  Vector raw = xi - v_g;
  return {raw.cwiseMax(0.0), raw};
}

Oscillation oscillation_stat(const Trace& trace, std::size_t window) {
  if (window == 0 || window > trace.records.size())
    throw std::invalid_argument("oscillation window must be in [1, trace length]");
  const auto first = trace.records.end() - static_cast<std::ptrdiff_t>(window);
  Oscillation out;
  out.xi.resize(trace.num_constraints);
  for (int i = 0; i < trace.num_constraints; ++i) {
    const auto [lo, hi] = std::minmax_element(
        first, trace.records.end(),
        [i](const TraceRecord& a, const TraceRecord& b) { return a.xi(i) < b.xi(i); });
    out.xi[i] = hi->xi(i) - lo->xi(i);
  }
  const auto [lo, hi] = std::minmax_element(
      first, trace.records.end(),
      [](const TraceRecord& a, const TraceRecord& b) { return a.v_r < b.v_r; });
  out.v_r = hi->v_r - lo->v_r;
  return out;
}

MetricsReport summarize_run(const Cmdp& model, const CostFunction& cost, const Trace& trace,
                            std::optional<double> v_h_star, std::size_t oscillation_window) {
  MetricsReport report;
  const auto& last = trace.records.back();
  report.v_h_star = v_h_star;
  if (v_h_star) {
    report.regret_opt = compute_regrets(trace.sums, v_h_star).opt;
    report.final_gap = *v_h_star - (last.v_r - last.h);
  }
  const Vector deficit = trace.sums.count > 0 ? Vector(trace.sums.slack_deficit / trace.sums.count)
                                               : Vector::Zero(trace.num_constraints);
  report.regret_vio = deficit.cwiseMax(0.0).sum();
  const auto& final_point = trace.final_state.current;
  const auto viol = compute_violations(model, final_point.policy, final_point.xi);
  report.violations = viol.deficit;
  report.tightness = viol.raw.norm();
  report.oscillation =
      oscillation_stat(trace, std::clamp<std::size_t>(oscillation_window, 1, trace.records.size()));
  report.policy_drift = trace.final_policy_drift;
  report.final_v_r = last.v_r;
  report.final_xi = final_point.xi;
  report.final_lam = final_point.lam;
  const Vector station = cost.gradient(final_point.xi) + final_point.lam;
  report.stationarity = station.size() > 0 ? station.cwiseAbs().maxCoeff() : 0.0;
  return report;
}

}  // namespace rescrl
