#include "rescrl/cmdp.hpp"

#include "rescrl/errors.hpp"
#include "rescrl/tolerances.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace rescrl {

namespace {

template <typename... Args>
std::string concat(const Args&... args) {
  std::ostringstream os;
  os.precision(17);
  (os << ... << args);
  return os.str();
}

bool in_unit_interval(const Matrix& m) {
  return m.allFinite() && m.minCoeff() >= 0.0 && m.maxCoeff() <= 1.0;
}

}  // namespace

std::vector<std::string> validate_cmdp(const Cmdp& model) {
  std::vector<std::string> report;
  const int S = model.num_states;
  const int A = model.num_actions;
  if (S < 1) report.push_back(concat("num_states must be positive, got ", S));
  if (A < 1) report.push_back(concat("num_actions must be positive, got ", A));
  if (!(model.gamma >= 0.0 && model.gamma < 1.0))
    report.push_back(concat("gamma must lie in [0,1), got ", model.gamma));
  if (!report.empty()) return report;

  if (model.rho.size() != S) {
    report.push_back(concat("rho has ", model.rho.size(), " entries, expected ", S));
  } else {
    if (!model.rho.allFinite() || model.rho.minCoeff() < 0.0)
      report.push_back("rho has negative or non-finite entries");
    if (std::abs(model.rho.sum() - 1.0) > Tolerances::model_sum)
      report.push_back(concat("rho sums to ", model.rho.sum()));
  }

  if (model.transitions.rows() != S * A || model.transitions.cols() != S) {
    report.push_back(concat("transitions must be ", S * A, "x", S, ", got ",
                            model.transitions.rows(), "x", model.transitions.cols()));
  } else {
    for (int s = 0; s < S; ++s) {
      for (int a = 0; a < A; ++a) {
        const auto row = model.transitions.row(model.row(s, a));
        if (!row.allFinite() || row.minCoeff() < 0.0)
          report.push_back(concat("transitions row (s=", s, ",a=", a, ") has negative entries"));
        const double sum = row.sum();
        if (std::abs(sum - 1.0) > Tolerances::model_sum)
          report.push_back(concat("transitions row (s=", s, ",a=", a, ") sums to ", sum));
      }
    }
  }

  if (model.reward.rows() != S || model.reward.cols() != A)
    report.push_back("reward table has the wrong shape");
  else if (!in_unit_interval(model.reward))
    report.push_back("reward entries must lie in [0,1]");

  const auto m = model.utilities.size();
  if (model.thresholds.size() != m)
    report.push_back(concat("utilities (", m, ") and thresholds (", model.thresholds.size(),
                            ") differ in count"));
  for (std::size_t i = 0; i < m; ++i) {
    const auto& u = model.utilities[i];
    if (u.rows() != S || u.cols() != A)
      report.push_back(concat("utility ", i, " has the wrong shape"));
    else if (!in_unit_interval(u))
      report.push_back(concat("utility ", i, " entries must lie in [0,1]"));
  }
  for (std::size_t i = 0; i < model.thresholds.size(); ++i) {
    const double b = model.thresholds[i];
    if (!(b > 0.0 && b <= model.horizon()))
      report.push_back(concat("threshold ", i, " = ", b, " outside (0, 1/(1-gamma)] = (0, ",
                              model.horizon(), "]"));
  }
  if (!report.empty()) return report;

  if (model.translated.size() != m) {
    report.push_back("translated utilities missing or out of sync");
    return report;
  }
  for (std::size_t i = 0; i < m; ++i) {
    const auto& g = model.translated[i];
    if (g.rows() != S || g.cols() != A) {
      report.push_back(concat("translated utility ", i, " has the wrong shape"));
      continue;
    }
    const double shift = (1.0 - model.gamma) * model.thresholds[i];
    const double err = (g - (model.utilities[i].array() - shift).matrix()).cwiseAbs().maxCoeff();
    if (err > Tolerances::model_sum)
      report.push_back(concat("translated utility ", i, " differs from u - (1-gamma)b by ", err));
    if (g.minCoeff() < -1.0 || g.maxCoeff() > 1.0)
      report.push_back(concat("translated utility ", i, " leaves [-1,1]"));
  }
  return report;
}

std::vector<Matrix> translate_constraints(const std::vector<Matrix>& utilities,
                                          const std::vector<double>& thresholds, double gamma) {
  if (!(gamma >= 0.0 && gamma < 1.0)) throw std::domain_error("gamma must lie in [0,1)");
  if (utilities.size() != thresholds.size())
    throw std::domain_error("utilities and thresholds differ in count");
  const double horizon = 1.0 / (1.0 - gamma);
  std::vector<Matrix> out;
  out.reserve(utilities.size());
  for (std::size_t i = 0; i < utilities.size(); ++i) {
    const double b = thresholds[i];
    if (!(b > 0.0 && b <= horizon))
      throw std::domain_error(concat("threshold ", i, " = ", b, " outside (0, ", horizon, "]"));
    out.emplace_back(utilities[i].array() - (1.0 - gamma) * b);
  }
  return out;
}

Cmdp make_cmdp(double gamma, Vector rho, Matrix transitions, Matrix reward,
               std::vector<Matrix> utilities, std::vector<double> thresholds) {
  Cmdp model;
  model.num_states = static_cast<int>(reward.rows());
  model.num_actions = static_cast<int>(reward.cols());
  model.gamma = gamma;
  model.rho = std::move(rho);
  model.transitions = std::move(transitions);
  model.reward = std::move(reward);
  model.utilities = std::move(utilities);
  model.thresholds = std::move(thresholds);
  try {
    model.translated = translate_constraints(model.utilities, model.thresholds, gamma);
  } catch (const std::domain_error&) {
    // validate_cmdp names the offending entries below.
  }
  const auto report = validate_cmdp(model);
  if (!report.empty()) {
    std::string msg = "invalid CMDP:";
    for (const auto& line : report) msg += "\n  " + line;
    throw ConfigError(msg);
  }
  return model;
}

Policy::Policy(Matrix probs) : probs_(std::move(probs)) {
  if (probs_.rows() < 1 || probs_.cols() < 1) throw std::invalid_argument("empty policy table");
  if (!probs_.allFinite() || probs_.minCoeff() < 0.0)
    throw std::invalid_argument("policy has negative or non-finite entries");
  for (Eigen::Index s = 0; s < probs_.rows(); ++s) {
    if (std::abs(probs_.row(s).sum() - 1.0) > Tolerances::invariant_slack)
      throw std::invalid_argument(concat("policy row ", s, " sums to ", probs_.row(s).sum()));
  }
}

Policy Policy::uniform(int num_states, int num_actions) {
  return Policy(Matrix::Constant(num_states, num_actions, 1.0 / num_actions));
}

PolicyEvaluator::PolicyEvaluator(const Cmdp& model, const Policy& policy)
    : model_(model), probs_(policy.probs()) {
  const int S = model.num_states;
  const int A = model.num_actions;
  if (policy.num_states() != S || policy.num_actions() != A)
    throw std::invalid_argument("policy shape does not match the model");
  Matrix p_pi = Matrix::Zero(S, S);
  for (int s = 0; s < S; ++s)
    for (int a = 0; a < A; ++a) p_pi.row(s) += probs_(s, a) * model.transitions.row(model.row(s, a));
  system_ = Matrix::Identity(S, S) - model.gamma * p_pi;
  lu_.compute(system_);
}

Vector PolicyEvaluator::values(const Matrix& cost) const {
  const Vector c_pi = (probs_.array() * cost.array()).rowwise().sum();
  Vector v = lu_.solve(c_pi);
  const double scale = std::max(1.0, c_pi.cwiseAbs().maxCoeff());
  const double residual = (system_ * v - c_pi).cwiseAbs().maxCoeff();
  if (!(residual <= Tolerances::solve_residual * scale))
    throw NumericalError(concat("policy evaluation residual ", residual));
  return v;
}

Matrix PolicyEvaluator::q_values(const Matrix& cost, const Vector& values) const {
  const Vector next = model_.transitions * values;
  Matrix q = cost;
  for (int s = 0; s < model_.num_states; ++s)
    for (int a = 0; a < model_.num_actions; ++a) q(s, a) += model_.gamma * next(model_.row(s, a));
  return q;
}

Vector PolicyEvaluator::visitation() const {
  const Vector rhs = (1.0 - model_.gamma) * model_.rho;
  Vector d = lu_.transpose().solve(rhs);
  const double residual = (system_.transpose() * d - rhs).cwiseAbs().maxCoeff();
  if (!(residual <= Tolerances::solve_residual))
    throw NumericalError(concat("visitation residual ", residual));
  return d / d.sum();
}

namespace {

ValueBundle evaluate_impl(const Cmdp& model, const Policy& policy, const Vector* weights) {
  const PolicyEvaluator eval(model, policy);
  ValueBundle out;
  out.v_reward = eval.values(model.reward);
  out.q_reward = eval.q_values(model.reward, out.v_reward);
  out.adv_reward = out.q_reward.colwise() - out.v_reward;
  out.v_reward_rho = model.rho.dot(out.v_reward);
  const int m = model.num_constraints();
  out.v_utils_rho.resize(m);
  for (int i = 0; i < m; ++i) {
    out.v_utils.push_back(eval.values(model.translated[i]));
    out.q_utils.push_back(eval.q_values(model.translated[i], out.v_utils.back()));
    out.v_utils_rho(i) = model.rho.dot(out.v_utils.back());
  }
  if (weights != nullptr) {
    if (weights->size() != m) throw std::invalid_argument("multiplier length differs from m");
    if (m > 0 && weights->minCoeff() < 0.0) throw std::invalid_argument("negative multiplier");
    Matrix cost = model.reward;
    for (int i = 0; i < m; ++i) cost += (*weights)(i) * model.translated[i];
    ScalarizedValues sc;
    sc.v = eval.values(cost);
    sc.q = eval.q_values(cost, sc.v);
    sc.v_rho = model.rho.dot(sc.v);
    out.scalarized = std::move(sc);
  }
  return out;
}

}  // namespace

ValueBundle evaluate_policy(const Cmdp& model, const Policy& policy) {
  return evaluate_impl(model, policy, nullptr);
}

ValueBundle evaluate_policy(const Cmdp& model, const Policy& policy, const Vector& weights) {
  return evaluate_impl(model, policy, &weights);
}

Vector visitation(const Cmdp& model, const Policy& policy) {
  return PolicyEvaluator(model, policy).visitation();
}

Vector project_simplex(const Eigen::Ref<const Vector>& v) {
  const Eigen::Index n = v.size();
  if (n == 0) throw std::domain_error("cannot project an empty vector onto the simplex");
  std::vector<double> sorted(v.data(), v.data() + n);
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumsum = 0.0;
  double theta = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    cumsum += sorted[k];
    const double candidate = (cumsum - 1.0) / static_cast<double>(k + 1);
    if (sorted[k] - candidate > 0.0) theta = candidate;
  }
  Vector out = (v.array() - theta).cwiseMax(0.0);
  return out;
}

Policy greedy_policy(const Matrix& q) {
  Matrix probs = Matrix::Zero(q.rows(), q.cols());
  for (Eigen::Index s = 0; s < q.rows(); ++s) {
    Eigen::Index best = 0;
    for (Eigen::Index a = 1; a < q.cols(); ++a)
      if (q(s, a) > q(s, best)) best = a;
    probs(s, best) = 1.0;
  }
  return Policy(std::move(probs));
}

}  // namespace rescrl
