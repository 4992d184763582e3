#include "rescrl/algorithms.hpp"

#include "rescrl/errors.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace rescrl {

std::string to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::respgpd: return "respgpd";
    case Algorithm::resopgpd: return "resopgpd";
    case Algorithm::baseline: return "baseline";
  }
  return "unknown";
}

Algorithm parse_algorithm(std::string_view name) {
  if (name == "respgpd") return Algorithm::respgpd;
  if (name == "resopgpd") return Algorithm::resopgpd;
  if (name == "baseline") return Algorithm::baseline;
  throw ConfigError("unknown algorithm '" + std::string(name) +
                    "' (expected respgpd, resopgpd or baseline)");
}

void AlgoConfig::validate() const {
  if (!(std::isfinite(eta) && eta > 0.0)) throw ConfigError("eta must be positive");
  if (horizon < 0) throw ConfigError("T must be non-negative");
  if (!(std::isfinite(lambda_cap) && lambda_cap > 0.0))
    throw ConfigError("lambda_cap must be positive and finite");
  if (trace_every < 1) throw ConfigError("trace_every must be at least 1");
  if (!cost) throw ConfigError("missing cost function");
}

ResilientIterate ResilientIterate::initial(const Cmdp& model, bool with_anchor) {
  const int m = model.num_constraints();
  Iterate start{Policy::uniform(model.num_states, model.num_actions), Vector::Zero(m),
                Vector::Zero(m)};
  ResilientIterate state{start, std::nullopt};
  if (with_anchor) state.anchor = std::move(start);
  return state;
}

PointEval evaluate_point(const Cmdp& model, const CostFunction& cost, const Iterate& point) {
  const auto values = evaluate_policy(model, point.policy, point.lam);
  PointEval out;
  out.v_r = values.v_reward_rho;
  out.v_g = values.v_utils_rho;
  out.h = cost.value(point.xi);
  out.lagrangian = values.scalarized->v_rho - out.h - point.lam.dot(point.xi);
  out.q_lagrangian = values.scalarized->q;
  out.xi_ascent = -cost.gradient(point.xi) - point.lam;
  out.lam_descent = out.v_g - point.xi;
  return out;
}

Iterate proximal_step(const Iterate& from, const PointEval& at, double eta, double gamma,
                      const MultiplierDomain& domain, bool freeze_xi) {
  const Matrix& pi = from.policy.probs();
  Matrix next(pi.rows(), pi.cols());
  for (Eigen::Index s = 0; s < pi.rows(); ++s) {
    const Vector moved = (pi.row(s) + eta * at.q_lagrangian.row(s)).transpose();
    next.row(s) = project_simplex(moved).transpose();
  }
  Vector xi = freeze_xi ? from.xi : project_relaxation(from.xi + eta * at.xi_ascent, gamma);
  Vector lam = project_multiplier(from.lam - eta * at.lam_descent, domain);
  return Iterate{Policy(std::move(next)), std::move(xi), std::move(lam)};
}

ResilientIterate respgpd_step(const Cmdp& model, const CostFunction& cost,
                              const ResilientIterate& state, double eta,
                              const MultiplierDomain& domain) {
  const auto at = evaluate_point(model, cost, state.current);
  return ResilientIterate{proximal_step(state.current, at, eta, model.gamma, domain),
                          state.anchor};
}

namespace {

struct OptimisticResult {
  ResilientIterate state;
  PointEval eval;
};

OptimisticResult optimistic_advance(const Cmdp& model, const CostFunction& cost,
                                    const ResilientIterate& state, const PointEval& previous,
                                    double eta, const MultiplierDomain& domain, bool freeze_xi) {
  if (!state.anchor) throw std::invalid_argument("optimistic step needs an anchor iterate");
  const Iterate& anchor = *state.anchor;
  Iterate next = proximal_step(anchor, previous, eta, model.gamma, domain, freeze_xi);
  PointEval at_next = evaluate_point(model, cost, next);
  Iterate next_anchor = proximal_step(anchor, at_next, eta, model.gamma, domain, freeze_xi);
  return {ResilientIterate{std::move(next), std::move(next_anchor)}, std::move(at_next)};
}

double sup_distance(const Iterate& a, const Iterate& b) {
  double d = (a.policy.probs() - b.policy.probs()).cwiseAbs().maxCoeff();
  if (a.xi.size() > 0) {
    d = std::max(d, (a.xi - b.xi).cwiseAbs().maxCoeff());
    d = std::max(d, (a.lam - b.lam).cwiseAbs().maxCoeff());
  }
  return d;
}

TraceRecord make_record(long iter, const Iterate& point, const PointEval& eval) {
  return TraceRecord{iter,     eval.v_r, eval.v_g, point.xi, point.lam, eval.h, eval.lagrangian,
                     (point.xi - eval.v_g).cwiseMax(0.0)};
}

}  // namespace

ResilientIterate resopgpd_step(const Cmdp& model, const CostFunction& cost,
                               const ResilientIterate& state, double eta,
                               const MultiplierDomain& domain, bool freeze_xi) {
  const auto previous = evaluate_point(model, cost, state.current);
  return optimistic_advance(model, cost, state, previous, eta, domain, freeze_xi).state;
}

Trace run_algorithm(const Cmdp& model, const AlgoConfig& config) {
  config.validate();
  const CostFunction& cost = *config.cost;
  const MultiplierDomain domain(config.lambda_cap);
  const bool optimistic = config.algorithm != Algorithm::respgpd;
  const bool freeze_xi = config.algorithm == Algorithm::baseline;
  const int m = model.num_constraints();
  constexpr std::size_t kTailWindow = 100;

  ResilientIterate state = ResilientIterate::initial(model, optimistic);
  PointEval eval = evaluate_point(model, cost, state.current);

  std::vector<TraceRecord> records;
  records.push_back(make_record(0, state.current, eval));
  RunningSums sums{0, 0.0, Vector::Zero(m)};
  auto accumulate = [&](const Iterate& point, const PointEval& at) {
    ++sums.count;
    sums.regularized_value += at.v_r - at.h;
    sums.slack_deficit += point.xi - at.v_g;
  };

  std::deque<double> motion;
  double drift = 0.0;
  for (long t = 0; t < config.horizon; ++t) {
    accumulate(state.current, eval);
    const Iterate before = optimistic ? *state.anchor : state.current;
    const Iterate before_current = state.current;
    if (optimistic) {
      auto advanced = optimistic_advance(model, cost, state, eval, config.eta, domain, freeze_xi);
      state = std::move(advanced.state);
      eval = std::move(advanced.eval);
    } else {
      state.current = proximal_step(state.current, eval, config.eta, model.gamma, domain);
      eval = evaluate_point(model, cost, state.current);
    }
    const Iterate& reported = optimistic ? *state.anchor : state.current;
    drift = (reported.policy.probs() - before.policy.probs()).norm();
    motion.push_back(sup_distance(state.current, before_current));
    if (motion.size() > kTailWindow) motion.pop_front();

    const long iter = t + 1;
    if (iter % config.trace_every == 0 || iter == config.horizon)
      records.push_back(make_record(iter, state.current, eval));
  }
  if (config.horizon == 0) accumulate(state.current, eval);

  const double tail = motion.empty() ? 0.0 : *std::max_element(motion.begin(), motion.end());
  return Trace{m, std::move(records), std::move(state), std::move(sums), drift, tail};
}

}  // namespace rescrl
