#include "rescrl/commands.hpp"

#include "rescrl/errors.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <thread>

namespace rescrl {

namespace fs = std::filesystem;

RunResult execute_run(const RunConfig& config, std::optional<std::uint64_t> seed_override) {
  const Cmdp model = build_env(config.env, seed_override);
  AlgoConfig algo = config.algo;
  if (seed_override) algo.seed = *seed_override;

  std::optional<OracleReport> oracle;
  std::optional<double> v_h_star = config.v_h_star;
  if (!v_h_star && config.oracle) {
    oracle = solve_regularized(model, *algo.cost, *config.oracle);
    if (oracle->status == OracleStatus::optimal) v_h_star = oracle->primal_value;
  }
  Trace trace = run_algorithm(model, algo);
  MetricsReport metrics =
      summarize_run(model, *algo.cost, trace, v_h_star, config.oscillation_window);
  return RunResult{std::move(trace), std::move(metrics), std::move(oracle)};
}

void write_run_outputs(const RunResult& result, const RunConfig& config, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  {
    std::ofstream csv(out_dir / "trace.csv");
    if (!csv) throw ConfigError("cannot write " + (out_dir / "trace.csv").string());
    write_trace_csv(csv, result.trace);
  }
  Json j = metrics_to_json(result.metrics);
  j["algorithm"] = to_string(config.algo.algorithm);
  j["eta"] = config.algo.eta;
  j["T"] = config.algo.horizon;
  j["lambda_cap"] = config.algo.lambda_cap;
  j["cost"] = {{"kind", config.algo.cost->kind()}};
  if (const auto* q = dynamic_cast<const QuadraticCost*>(config.algo.cost.get()))
    j["cost"]["alpha"] = q->alpha();
  if (result.oracle) j["oracle"] = oracle_to_json(*result.oracle);
  std::ofstream out(out_dir / "metrics.json");
  if (!out) throw ConfigError("cannot write " + (out_dir / "metrics.json").string());
  out << j.dump(2) << '\n';
}

std::vector<double> parse_log_range(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string piece; std::getline(ss, piece, ':');) parts.push_back(piece);
  if (parts.size() != 4 || parts[2] != "log")
    throw ConfigError("range must look like lo:hi:log:n, got '" + text + "'");
  double lo = 0.0;
  double hi = 0.0;
  int n = 0;
  try {
    lo = std::stod(parts[0]);
    hi = std::stod(parts[1]);
    n = std::stoi(parts[3]);
  } catch (const std::exception&) {
    throw ConfigError("range must look like lo:hi:log:n, got '" + text + "'");
  }
  if (!(lo > 0.0 && hi >= lo) || n < 2) throw ConfigError("range needs 0 < lo <= hi and n >= 2");
  std::vector<double> values(n);
  const double step = std::log(hi / lo) / (n - 1);
  for (int k = 0; k < n; ++k) values[k] = lo * std::exp(step * k);
  values.front() = lo;
  values.back() = hi;
  return values;
}

SweepSpec sweep_spec_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("sweep spec must be a JSON object");
  SweepSpec spec;
  if (j.contains("parameter")) spec.parameter = j.at("parameter").get<std::string>();
  if (spec.parameter != "alpha" && spec.parameter != "eta" && spec.parameter != "T")
    throw ConfigError("sweep parameter must be alpha, eta or T");
  if (j.contains("values")) {
    spec.values = j.at("values").get<std::vector<double>>();
  } else if (j.contains("range")) {
    spec.values = parse_log_range(j.at("range").get<std::string>());
  }
  for (double v : spec.values)
    if (!(v > 0.0)) throw ConfigError("sweep values must be positive");
  if (!j.contains("base")) throw ConfigError("sweep spec needs a 'base' run config");
  spec.base = j.at("base").is_string() ? read_json_file(j.at("base").get<std::string>())
                                       : j.at("base");
  return spec;
}

Json apply_sweep_value(const Json& base, const std::string& parameter, double value) {
  Json j = base;
  if (parameter == "alpha") {
    if (!j.contains("cost")) j["cost"] = {{"kind", "quadratic"}};
    j["cost"]["alpha"] = value;
  } else if (parameter == "eta") {
    j["eta"] = value;
  } else if (parameter == "T") {
    j["T"] = std::lround(value);
  } else {
    throw ConfigError("unknown sweep parameter '" + parameter + "'");
  }
  return j;
}

std::string sweep_summary_header(int m) {
  std::string h = "index,value,status,final_v_r";
  for (int i = 1; i <= m; ++i) h += ",xi_" + std::to_string(i);
  for (int i = 1; i <= m; ++i) h += ",osc_xi_" + std::to_string(i);
  return h + ",osc_v_r,final_gap,error";
}

int resolve_jobs(std::optional<int> flag) {
  if (flag && *flag > 0) return *flag;
  if (const char* env = std::getenv("RESCRL_JOBS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return n;
    } catch (const std::exception&) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

std::string run_dir_name(std::size_t index) {
  std::ostringstream os;
  os << "run_" << std::setw(3) << std::setfill('0') << index;
  return os.str();
}

std::string csv_escape(std::string s) {
  for (char& c : s)
    if (c == ',' || c == '\n' || c == '"') c = ' ';
  return s;
}

}  // namespace

std::vector<SweepRow> run_sweep(const SweepSpec& spec, const fs::path& out_dir, int jobs,
                                std::optional<std::uint64_t> seed_override,
                                std::optional<long> trace_every) {
  // Fail fast on a broken base config before launching anything.
  const RunConfig probe = run_config_from_json(spec.base);
  const int m = build_env(probe.env, seed_override).num_constraints();
  fs::create_directories(out_dir);

  std::vector<SweepRow> rows(spec.values.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < spec.values.size(); k = next++) {
      SweepRow& row = rows[k];
      row.value = spec.values[k];
      try {
        RunConfig cfg = run_config_from_json(apply_sweep_value(spec.base, spec.parameter, row.value));
        if (trace_every) cfg.algo.trace_every = *trace_every;
        const auto result = execute_run(cfg, seed_override);
        write_run_outputs(result, cfg, out_dir / run_dir_name(k));
        row.ok = true;
        row.final_v_r = result.metrics.final_v_r;
        row.final_xi = result.metrics.final_xi;
        row.oscillation_xi = result.metrics.oscillation.xi;
        row.oscillation_v_r = result.metrics.oscillation.v_r;
        row.final_gap = result.metrics.final_gap;
      } catch (const std::exception& e) {
        row.ok = false;
        row.error = e.what();
      }
    }
  };
  const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(spec.values.size())));
  {
    std::vector<std::jthread> pool;
    for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
  }

  std::ofstream csv(out_dir / "summary.csv");
  if (!csv) throw ConfigError("cannot write " + (out_dir / "summary.csv").string());
  csv << sweep_summary_header(m) << '\n';
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto& row = rows[k];
    csv << k << ',' << format_double(row.value) << ',' << (row.ok ? "ok" : "failed") << ','
        << (row.ok ? format_double(row.final_v_r) : "");
    for (int i = 0; i < m; ++i) csv << ',' << (row.ok ? format_double(row.final_xi(i)) : "");
    for (int i = 0; i < m; ++i) csv << ',' << (row.ok ? format_double(row.oscillation_xi[i]) : "");
    csv << ',' << (row.ok ? format_double(row.oscillation_v_r) : "") << ','
        << (row.final_gap ? format_double(*row.final_gap) : "") << ',' << csv_escape(row.error)
        << '\n';
  }
  return rows;
}

namespace {

std::optional<std::uint64_t> opt_seed(const CLI::Option* opt, std::uint64_t value) {
  return opt->count() > 0 ? std::optional<std::uint64_t>(value) : std::nullopt;
}

std::vector<double> parse_alpha_list(const std::string& text) {
  if (text.find(':') != std::string::npos) return parse_log_range(text);
  std::vector<double> out;
  std::stringstream ss(text);
  for (std::string piece; std::getline(ss, piece, ',');) {
    try {
      out.push_back(std::stod(piece));
    } catch (const std::exception&) {
      throw ConfigError("--alphas expects a comma list or lo:hi:log:n");
    }
  }
  return out;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"Resilient constrained MDP solvers"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  std::uint64_t seed = 0;
  long trace_every = 1;
  int jobs = 0;
  int grid = 21;
  std::string alphas;

  auto* gen = app.add_subcommand("gen-env", "Build an environment and write its explicit JSON");
  gen->add_option("--config", config_path, "Env spec JSON")->required();
  gen->add_option("--out", out_path, "Output env JSON")->required();
  auto* gen_seed = gen->add_option("--seed", seed, "Override the random env seed");

  auto* run = app.add_subcommand("run", "Run one solver and write trace.csv + metrics.json");
  run->add_option("--config", config_path, "Run config JSON")->required();
  run->add_option("--out", out_path, "Output directory")->required();
  auto* run_seed = run->add_option("--seed", seed, "Override the random env seed");
  auto* run_every = run->add_option("--trace-every", trace_every, "Trace subsampling");

  auto* sweep = app.add_subcommand("sweep", "Sweep alpha, eta or T over a base run config");
  sweep->add_option("--config", config_path, "Sweep spec JSON")->required();
  sweep->add_option("--out", out_path, "Output directory")->required();
  auto* sweep_seed = sweep->add_option("--seed", seed, "Override the random env seed");
  auto* sweep_every = sweep->add_option("--trace-every", trace_every, "Trace subsampling");
  auto* sweep_jobs = sweep->add_option("--jobs", jobs, "Concurrent runs");
  auto* sweep_alphas =
      sweep->add_option("--alphas", alphas, "Comma list or lo:hi:log:n; sweeps alpha");

  auto* oracle = app.add_subcommand("oracle", "Solve for V_h* by the primal grid and the dual");
  oracle->add_option("--config", config_path, "Run config JSON (env + cost)")->required();
  oracle->add_option("--out", out_path, "Output report JSON (stdout if omitted)");
  auto* oracle_seed = oracle->add_option("--seed", seed, "Override the random env seed");
  auto* oracle_grid = oracle->add_option("--grid", grid, "Grid points per relaxation coordinate");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (gen->parsed()) {
      const Cmdp model = build_env(read_json_file(config_path), opt_seed(gen_seed, seed));
      std::ofstream out(out_path);
      if (!out) throw ConfigError("cannot write " + out_path);
      out << cmdp_to_json(model).dump() << '\n';
    } else if (run->parsed()) {
      RunConfig cfg = run_config_from_json(read_json_file(config_path));
      if (run_every->count() > 0) cfg.algo.trace_every = trace_every;
      cfg.algo.validate();
      const auto result = execute_run(cfg, opt_seed(run_seed, seed));
      write_run_outputs(result, cfg, out_path);
    } else if (sweep->parsed()) {
      SweepSpec spec = sweep_spec_from_json(read_json_file(config_path));
      if (sweep_alphas->count() > 0) {
        spec.parameter = "alpha";
        spec.values = parse_alpha_list(alphas);
      }
      if (spec.values.empty()) throw ConfigError("sweep has no values");
      const auto n_jobs = resolve_jobs(sweep_jobs->count() > 0 ? std::optional<int>(jobs)
                                                                : std::nullopt);
      const auto rows = run_sweep(spec, out_path, n_jobs, opt_seed(sweep_seed, seed),
                                  sweep_every->count() > 0 ? std::optional<long>(trace_every)
                                                           : std::nullopt);
      for (std::size_t k = 0; k < rows.size(); ++k)
        if (!rows[k].ok) std::cerr << "run " << k << " failed: " << rows[k].error << '\n';
    } else if (oracle->parsed()) {
      const RunConfig cfg = run_config_from_json(read_json_file(config_path));
      const Cmdp model = build_env(cfg.env, opt_seed(oracle_seed, seed));
      RegularizedOptions opt = cfg.oracle.value_or(RegularizedOptions{});
      if (!cfg.oracle) opt.lambda_cap = cfg.algo.lambda_cap;
      if (oracle_grid->count() > 0) opt.grid_resolution = grid;
      const auto report = solve_regularized(model, *cfg.algo.cost, opt);
      const auto text = oracle_to_json(report).dump(2);
      if (out_path.empty()) {
        std::cout << text << '\n';
      } else {
        std::ofstream out(out_path);
        if (!out) throw ConfigError("cannot write " + out_path);
        out << text << '\n';
      }
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const Json::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::domain_error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitOk;
}

}  // namespace rescrl
