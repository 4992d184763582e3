#pragma once

#include "rescrl/io.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace rescrl {

/// Process exit codes of the command-line front end.
enum ExitCode : int { kExitOk = 0, kExitFailure = 1, kExitConfig = 2, kExitNumerical = 3 };

struct RunResult {
  Trace trace;
  MetricsReport metrics;
  std::optional<OracleReport> oracle;
};

/// Builds the env, optionally solves the oracle, runs the solver and summarizes.
RunResult execute_run(const RunConfig& config, std::optional<std::uint64_t> seed_override = {});

/// Writes `trace.csv` and `metrics.json` into `out_dir` (created if needed).
void write_run_outputs(const RunResult& result, const RunConfig& config,
                       const std::filesystem::path& out_dir);

struct SweepSpec {
  /// alpha, eta or T.
  std::string parameter = "alpha";
  std::vector<double> values;
  Json base;
};

/// Parses "lo:hi:log:n" into n log-spaced values (n >= 2, 0 < lo <= hi).
std::vector<double> parse_log_range(const std::string& text);

/// {"parameter": ..., "values": [...] | "range": "lo:hi:log:n", "base": {run config} | path}
SweepSpec sweep_spec_from_json(const Json& j);

/// Copy of the base run config with the swept parameter set to `value`.
Json apply_sweep_value(const Json& base, const std::string& parameter, double value);

struct SweepRow {
  double value = 0.0;
  bool ok = false;
  std::string error;
  double final_v_r = 0.0;
  Vector final_xi;
  std::vector<double> oscillation_xi;
  double oscillation_v_r = 0.0;
  std::optional<double> final_gap;
};

/**
 * Runs every value (up to `jobs` at once), writing run_<k>/ per value and
 * summary.csv with one row per value in input order. A failing run is
 * recorded in its row and the sweep continues.
 */
std::vector<SweepRow> run_sweep(const SweepSpec& spec, const std::filesystem::path& out_dir,
                                int jobs, std::optional<std::uint64_t> seed_override = {},
                                std::optional<long> trace_every = {});

std::string sweep_summary_header(int num_constraints);

/// Worker count: explicit flag, else RESCRL_JOBS, else hardware concurrency.
int resolve_jobs(std::optional<int> flag);

/// Entry point of the `rescrl` tool. Returns an ExitCode.
int cli_main(int argc, const char* const* argv);

}  // namespace rescrl
