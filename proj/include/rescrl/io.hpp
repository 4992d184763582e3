#pragma once

#include "rescrl/algorithms.hpp"
#include "rescrl/metrics.hpp"
#include "rescrl/oracle.hpp"

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace rescrl {

using Json = nlohmann::json;

/// Reads and parses a JSON file; throws ConfigError on I/O or syntax errors.
Json read_json_file(const std::filesystem::path& path);

/// Explicit env schema: num_states, num_actions, gamma, rho, transitions[s][a][s'],
/// reward[s][a], utilities[i][s][a], thresholds[i].
Json cmdp_to_json(const Cmdp& model);
/// Parses the explicit schema and validates the model (ConfigError on any problem).
Cmdp cmdp_from_json(const Json& j);

/**
 * Builds a model from an env spec: a path string to an explicit env file, or
 * an object whose "kind" is random, monitor3, grid_monitor or explicit
 * (the default when "kind" is absent). `seed_override` replaces the seed of a
 * random spec.
 */
Cmdp build_env(const Json& spec, std::optional<std::uint64_t> seed_override = std::nullopt);

/// {"kind": "quadratic", "alpha": a}
std::shared_ptr<const CostFunction> cost_from_json(const Json& j);

struct RunConfig {
  Json env;
  AlgoConfig algo;
  /// Oracle options when the config asks for V_h* to be computed.
  std::optional<RegularizedOptions> oracle;
  /// A fixed V_h* supplied by the user (skips the oracle).
  std::optional<double> v_h_star;
  std::size_t oscillation_window = 200;
};

/// Parses a run config; every field except "env" has a default. Throws ConfigError.
RunConfig run_config_from_json(const Json& j);

/// Header `iter,v_r,v_g_1..m,xi_1..m,lambda_1..m,h,lagrangian,viol_1..m`.
std::string trace_csv_header(int num_constraints);
void write_trace_csv(std::ostream& os, const Trace& trace);

Json metrics_to_json(const MetricsReport& report);
Json oracle_to_json(const OracleReport& report);

/// Shortest round-trip decimal for a double ("inf"/"nan" spelled out).
std::string format_double(double x);

}  // namespace rescrl
