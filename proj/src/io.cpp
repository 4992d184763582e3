#include "rescrl/io.hpp"

#include "rescrl/environments.hpp"
#include "rescrl/errors.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>

namespace rescrl {

namespace {

template <typename T>
T get_or(const Json& j, const char* key, T fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("field '") + key + "': " + e.what());
  }
}

template <typename T>
T require(const Json& j, const char* key) {
  if (!j.contains(key)) throw ConfigError(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("field '") + key + "': " + e.what());
  }
}

Matrix table_from_json(const Json& j, int rows, int cols, const std::string& what) {
  if (!j.is_array() || static_cast<int>(j.size()) != rows)
    throw ConfigError(what + " must be an array of " + std::to_string(rows) + " rows");
  Matrix m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    const auto& row = j[r];
    if (!row.is_array() || static_cast<int>(row.size()) != cols)
      throw ConfigError(what + " row " + std::to_string(r) + " must have " +
                        std::to_string(cols) + " entries");
    for (int c = 0; c < cols; ++c) {
      if (!row[c].is_number()) throw ConfigError(what + " has a non-numeric entry");
      m(r, c) = row[c].get<double>();
    }
  }
  return m;
}

Json table_to_json(const Matrix& m) {
  Json out = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    out.push_back(std::move(row));
  }
  return out;
}

Json vector_to_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::isfinite(v(i))) out.push_back(v(i));
    else out.push_back(nullptr);
  }
  return out;
}

Json number_or_null(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

MonitorParams monitor_from_json(const Json& j) {
  MonitorParams p;
  p.gamma = get_or(j, "gamma", p.gamma);
  if (j.contains("b_values")) {
    const auto b = require<std::vector<double>>(j, "b_values");
    if (b.size() != 3) throw ConfigError("b_values needs three entries (b_0, b_1, b_2)");
    std::copy(b.begin(), b.end(), p.payoff.begin());
  }
  if (j.contains("thresholds")) {
    const auto c = require<std::vector<double>>(j, "thresholds");
    if (c.size() != 2) throw ConfigError("thresholds needs two entries (c_1, c_2)");
    std::copy(c.begin(), c.end(), p.targets.begin());
  }
  return p;
}

GridArea area_from_json(const Json& j, const char* name) {
  const auto v = require<std::vector<int>>(j, name);
  if (v.size() != 4)
    throw ConfigError(std::string("area ") + name + " must be [row_lo, row_hi, col_lo, col_hi]");
  return GridArea{v[0], v[1], v[2], v[3]};
}

}  // namespace

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError("cannot parse " + path.string() + ": " + e.what());
  }
}

Json cmdp_to_json(const Cmdp& model) {
  Json j;
  j["num_states"] = model.num_states;
  j["num_actions"] = model.num_actions;
  j["gamma"] = model.gamma;
  j["rho"] = vector_to_json(model.rho);
  Json transitions = Json::array();
  for (int s = 0; s < model.num_states; ++s)
    transitions.push_back(
        table_to_json(model.transitions.middleRows(s * model.num_actions, model.num_actions)));
  j["transitions"] = std::move(transitions);
  j["reward"] = table_to_json(model.reward);
  Json utilities = Json::array();
  for (const auto& u : model.utilities) utilities.push_back(table_to_json(u));
  j["utilities"] = std::move(utilities);
  j["thresholds"] = model.thresholds;
  return j;
}

Cmdp cmdp_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("env must be a JSON object");
  const int S = require<int>(j, "num_states");
  const int A = require<int>(j, "num_actions");
  if (S < 1 || A < 1) throw ConfigError("num_states and num_actions must be positive");
  const double gamma = require<double>(j, "gamma");
  const auto rho_list = require<std::vector<double>>(j, "rho");
  if (static_cast<int>(rho_list.size()) != S) throw ConfigError("rho must have num_states entries");
  Vector rho = Eigen::Map<const Vector>(rho_list.data(), S);

  if (!j.contains("transitions")) throw ConfigError("missing field 'transitions'");
  const auto& tj = j.at("transitions");
  if (!tj.is_array() || static_cast<int>(tj.size()) != S)
    throw ConfigError("transitions must be an array [s][a][s']");
  Matrix transitions(S * A, S);
  for (int s = 0; s < S; ++s)
    transitions.middleRows(s * A, A) =
        table_from_json(tj[s], A, S, "transitions[" + std::to_string(s) + "]");

  if (!j.contains("reward")) throw ConfigError("missing field 'reward'");
  Matrix reward = table_from_json(j.at("reward"), S, A, "reward");
  std::vector<Matrix> utilities;
  if (j.contains("utilities")) {
    const auto& uj = j.at("utilities");
    if (!uj.is_array()) throw ConfigError("utilities must be an array [i][s][a]");
    for (std::size_t i = 0; i < uj.size(); ++i)
      utilities.push_back(table_from_json(uj[i], S, A, "utilities[" + std::to_string(i) + "]"));
  }
  auto thresholds = get_or<std::vector<double>>(j, "thresholds", {});
  return make_cmdp(gamma, std::move(rho), std::move(transitions), std::move(reward),
                   std::move(utilities), std::move(thresholds));
}

Cmdp build_env(const Json& spec, std::optional<std::uint64_t> seed_override) {
  if (spec.is_string()) return cmdp_from_json(read_json_file(spec.get<std::string>()));
  if (!spec.is_object()) throw ConfigError("env must be a path or an object");
  const auto kind = get_or<std::string>(spec, "kind", "explicit");
  if (kind == "explicit") return cmdp_from_json(spec);
  if (kind == "random") {
    RandomCmdpSpec r;
    r.seed = seed_override.value_or(get_or<std::uint64_t>(spec, "seed", r.seed));
    r.num_states = get_or(spec, "num_states", r.num_states);
    r.num_actions = get_or(spec, "num_actions", r.num_actions);
    r.num_constraints = get_or(spec, "num_constraints", r.num_constraints);
    r.gamma = get_or(spec, "gamma", r.gamma);
    r.target = get_or(spec, "threshold", r.target);
    return gen_random_cmdp(r);
  }
  if (kind == "monitor3") return build_monitor3(monitor_from_json(spec));
  if (kind == "grid_monitor") {
    GridMonitorParams g;
    g.width = get_or(spec, "width", g.width);
    g.height = get_or(spec, "height", g.height);
    if (spec.contains("areas")) {
      const auto& areas = spec.at("areas");
      g.areas = {area_from_json(areas, "S0"), area_from_json(areas, "S1"),
                 area_from_json(areas, "S2")};
    }
    g.monitor = monitor_from_json(spec);
    return build_grid_monitor(g);
  }
  throw ConfigError("unknown env kind '" + kind + "'");
}

std::shared_ptr<const CostFunction> cost_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("cost must be an object");
  const auto kind = get_or<std::string>(j, "kind", "quadratic");
  if (kind != "quadratic") throw ConfigError("unknown cost kind '" + kind + "'");
  const double alpha = require<double>(j, "alpha");
  if (!(std::isfinite(alpha) && alpha >= 0.0)) throw ConfigError("alpha must be >= 0");
  return std::make_shared<QuadraticCost>(alpha);
}

RunConfig run_config_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("run config must be a JSON object");
  RunConfig cfg;
  if (!j.contains("env")) throw ConfigError("missing field 'env'");
  cfg.env = j.at("env");
  cfg.algo.algorithm = parse_algorithm(get_or<std::string>(j, "algorithm", "resopgpd"));
  cfg.algo.eta = get_or(j, "eta", cfg.algo.eta);
  cfg.algo.horizon = get_or(j, "T", cfg.algo.horizon);
  cfg.algo.lambda_cap = get_or(j, "lambda_cap", cfg.algo.lambda_cap);
  cfg.algo.trace_every = get_or(j, "trace_every", cfg.algo.trace_every);
  cfg.algo.seed = get_or<std::uint64_t>(j, "seed", cfg.algo.seed);
  if (j.contains("cost")) cfg.algo.cost = cost_from_json(j.at("cost"));
  cfg.oscillation_window = get_or<std::size_t>(j, "oscillation_window", cfg.oscillation_window);
  if (j.contains("v_h_star") && !j.at("v_h_star").is_null())
    cfg.v_h_star = require<double>(j, "v_h_star");
  if (j.contains("oracle") && !j.at("oracle").is_null()) {
    const auto& o = j.at("oracle");
    RegularizedOptions opt;
    opt.grid_resolution = get_or(o, "grid_resolution", opt.grid_resolution);
    opt.refine_rounds = get_or(o, "refine_rounds", opt.refine_rounds);
    opt.polish = get_or(o, "polish", opt.polish);
    opt.lambda_cap = get_or(o, "lambda_cap", cfg.algo.lambda_cap);
    if (o.contains("xi_lo")) opt.xi_lo = require<double>(o, "xi_lo");
    if (o.contains("xi_hi")) opt.xi_hi = require<double>(o, "xi_hi");
    cfg.oracle = opt;
  }
  cfg.algo.validate();
  return cfg;
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

std::string trace_csv_header(int m) {
  std::string h = "iter,v_r";
  for (const char* prefix : {"v_g_", "xi_", "lambda_"})
    for (int i = 1; i <= m; ++i) h += "," + std::string(prefix) + std::to_string(i);
  h += ",h,lagrangian";
  for (int i = 1; i <= m; ++i) h += ",viol_" + std::to_string(i);
  return h;
}

void write_trace_csv(std::ostream& os, const Trace& trace) {
  os << trace_csv_header(trace.num_constraints) << '\n';
  for (const auto& rec : trace.records) {
    os << rec.iter << ',' << format_double(rec.v_r);
    for (const Vector* v : {&rec.v_g, &rec.xi, &rec.lam})
      for (Eigen::Index i = 0; i < v->size(); ++i) os << ',' << format_double((*v)(i));
    os << ',' << format_double(rec.h) << ',' << format_double(rec.lagrangian);
    for (Eigen::Index i = 0; i < rec.violation.size(); ++i)
      os << ',' << format_double(rec.violation(i));
    os << '\n';
  }
}

Json metrics_to_json(const MetricsReport& r) {
  Json j;
  j["v_h_star"] = r.v_h_star ? number_or_null(*r.v_h_star) : Json(nullptr);
  j["regret_opt"] = r.regret_opt ? number_or_null(*r.regret_opt) : Json(nullptr);
  j["regret_vio"] = r.regret_vio;
  j["final_gap"] = r.final_gap ? number_or_null(*r.final_gap) : Json(nullptr);
  j["violations"] = vector_to_json(r.violations);
  j["tightness"] = r.tightness;
  j["oscillation"] = {{"xi", r.oscillation.xi}, {"v_r", r.oscillation.v_r}};
  j["policy_drift"] = r.policy_drift;
  j["final_v_r"] = r.final_v_r;
  j["final_xi"] = vector_to_json(r.final_xi);
  j["final_lambda"] = vector_to_json(r.final_lam);
  j["stationarity"] = r.stationarity;
  return j;
}

Json oracle_to_json(const OracleReport& r) {
  Json j;
  j["primal_value"] = number_or_null(r.primal_value);
  j["dual_value"] = number_or_null(r.dual_value);
  j["xi_star"] = vector_to_json(r.xi_star);
  j["lambda_star"] = vector_to_json(r.lambda_star);
  j["status"] = to_string(r.status);
  j["grid_resolution"] = r.grid_resolution;
  j["duality_gap"] = number_or_null(r.duality_gap);
  j["note"] = "values are certified by two independent routes; the dual route does not recover "
              "a policy, and xi_star comes from the primal grid";
  return j;
}

}  // namespace rescrl
