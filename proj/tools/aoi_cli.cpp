// aoi: command-line runner for update-policy experiments.
//
//   aoi solve           --config <file> [--out <json>]
//   aoi sweep           --config <file> [--out <csv>]
//   aoi zero-wait-check --config <file>
//   aoi simulate        --config <file> [--out <csv>] [--trajectory <csv>]
//
// --seed overrides the simulation seed. Relative output paths are resolved
// against $AOI_OUTPUT_DIR when it is set.
//
// Exit codes: 0 success, 1 invalid input (including a model the command cannot
// handle), 2 the solver failed on every row.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "aoi/aoi.hpp"

namespace {

namespace fs = std::filesystem;

constexpr int kOk = 0;
constexpr int kInvalid = 1;
constexpr int kSolverFailed = 2;

// Raised for any failure that happens after the configuration was accepted.
struct SolverFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

aoi::ExperimentConfig load_config(const std::string& file, std::optional<std::uint64_t> seed) {
  std::ifstream in(file);
  if (!in) throw aoi::ValidationError("--config", "cannot open '" + file + "'");
  aoi::json root;
  try {
    root = aoi::json::parse(in);
  } catch (const aoi::json::parse_error& e) {
    throw aoi::ValidationError("--config", std::string("invalid JSON: ") + e.what());
  }
  aoi::ExperimentConfig cfg = aoi::parse_experiment(root);
  // A sweep without a simulation block stays analytic; simulate falls back to defaults.
  if (seed && cfg.simulation) cfg.simulation->seed = *seed;
  return cfg;
}

fs::path resolve_output(const std::string& flag, const std::string& from_config, const char* what) {
  const std::string chosen = flag.empty() ? from_config : flag;
  if (chosen.empty()) throw aoi::ValidationError("--out", std::string("no output path for ") + what);
  fs::path p(chosen);
  if (p.is_relative()) {
    if (const char* dir = std::getenv("AOI_OUTPUT_DIR"); dir && *dir) p = fs::path(dir) / p;
  }
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  return p;
}

std::ofstream open_output(const fs::path& p) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw aoi::ValidationError("--out", "cannot write '" + p.string() + "'");
  return out;
}

int cmd_solve(const aoi::ExperimentConfig& cfg, const std::string& out_flag) {
  const aoi::TransmissionModel model = aoi::build_model(cfg.model);
  const aoi::PenaltyFunction pf = aoi::build_penalty(cfg.penalty);
  aoi::json report;
  try {
    const aoi::SolveResult r = aoi::solve_optimal(cfg.solver, model, pf, cfg.algorithm);
    report = aoi::solve_result_to_json(r, model, cfg.solver);
    report["objective"] = aoi::objective_eval(r.policy, model, pf);
  } catch (const aoi::DomainError&) {
    throw;
  } catch (const aoi::UnsupportedModelError&) {
    throw;
  } catch (const std::exception& e) {
    throw SolverFailure(e.what());
  }
  if (!out_flag.empty()) {
    auto out = open_output(resolve_output(out_flag, "", "solve"));
    out << report.dump(2) << '\n';
  }
  std::cout << report.dump(2) << '\n';
  return kOk;
}

int cmd_sweep(const aoi::ExperimentConfig& cfg, const std::string& out_flag) {
  const aoi::ExperimentResult result = aoi::run_experiment(cfg);
  const fs::path path = resolve_output(out_flag, cfg.output, "sweep");
  auto out = open_output(path);
  aoi::write_csv(out, result);
  std::size_t failed = 0;
  for (const auto& row : result.rows)
    if (!row.error.empty()) ++failed;
  std::cerr << "wrote " << result.rows.size() << " rows to " << path.string();
  if (failed) std::cerr << " (" << failed << " with errors)";
  std::cerr << '\n';
  return result.all_rows_failed() ? kSolverFailed : kOk;
}

int cmd_zero_wait(const aoi::ExperimentConfig& cfg) {
  aoi::json report;
  try {
    report = aoi::check_zero_wait(cfg);
  } catch (const aoi::DomainError&) {
    throw;
  } catch (const aoi::ValidationError&) {
    throw;
  } catch (const aoi::UnsupportedModelError&) {
    throw;
  } catch (const std::exception& e) {
    throw SolverFailure(e.what());
  }
  std::cout << report.dump(2) << '\n';
  return kOk;
}

int cmd_simulate(const aoi::ExperimentConfig& cfg, std::optional<std::uint64_t> seed_override, const std::string& out_flag,
                 const std::string& trajectory) {
  aoi::SimulationSpec sim = cfg.simulation.value_or(aoi::SimulationSpec{});
  if (seed_override) sim.seed = *seed_override;
  const aoi::TransmissionModel model = aoi::build_model(cfg.model);
  const aoi::PenaltyFunction pf = aoi::build_penalty(cfg.penalty);

  std::optional<aoi::Policy> policy;
  aoi::json analytic = nullptr;  // traces have no stationary law to evaluate against
  try {
    policy = aoi::make_policy(sim.policy, cfg.solver, model, pf, cfg.algorithm);
    if (!model.is_trace()) analytic = aoi::objective_eval(*policy, model, pf);
  } catch (const aoi::DomainError&) {
    throw;
  } catch (const aoi::UnsupportedModelError&) {
    throw;
  } catch (const std::exception& e) {
    throw SolverFailure(e.what());
  }

  const aoi::SamplePath path = aoi::simulate(*policy, model, pf, sim.n_stages, sim.seed);
  const fs::path out_path = resolve_output(out_flag, cfg.output, "simulate");
  {
    auto out = open_output(out_path);
    aoi::write_path_csv(out, path);
  }
  if (!trajectory.empty()) {
    auto out = open_output(resolve_output(trajectory, "", "trajectory"));
    aoi::write_trajectory_csv(out, aoi::age_trajectory(path, pf, sim.time_step));
  }

  aoi::json report{{"policy", aoi::policy_to_json(*policy)},
                   {"stages", path.stages()},
                   {"seed", sim.seed},
                   {"path_ratio", path.ratio()},
                   {"analytic", analytic},
                   {"path_csv", out_path.string()}};
  const aoi::SimEstimate est = aoi::estimate(*policy, model, pf, sim.n_stages, sim.replications, sim.seed);
  report["estimate"] = {{"mean", est.mean_ratio},
                        {"stderr", est.stderr_ratio},
                        {"replications", est.replications},
                        {"frequency", est.empirical_frequency}};
  std::cout << report.dump(2) << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Age-of-information update policies: solve, sweep, check and simulate"};
  app.require_subcommand(1);
  app.fallthrough();

  std::optional<std::uint64_t> seed;
  app.add_option("--seed", seed, "override the simulation seed");

  std::string config, out, trajectory;
  auto* solve = app.add_subcommand("solve", "solve for the optimal policy and print it as JSON");
  solve->add_option("--config", config, "experiment JSON")->required();
  solve->add_option("--out", out, "also write the JSON here");

  auto* sweep = app.add_subcommand("sweep", "compare policies over the configured sweep");
  sweep->add_option("--config", config, "experiment JSON")->required();
  sweep->add_option("--out", out, "CSV output (defaults to the config's output)");

  auto* zw = app.add_subcommand("zero-wait-check", "test whether zero-wait is optimal");
  zw->add_option("--config", config, "experiment JSON")->required();

  auto* simulate = app.add_subcommand("simulate", "simulate one sample path and estimate the average penalty");
  simulate->add_option("--config", config, "experiment JSON")->required();
  simulate->add_option("--out", out, "path CSV (i,Y,Z,Q,D)");
  simulate->add_option("--trajectory", trajectory, "age trajectory CSV (t,delta,g_delta)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInvalid;
  }

  try {
    const aoi::ExperimentConfig cfg = load_config(config, seed);
    if (*solve) return cmd_solve(cfg, out);
    if (*sweep) return cmd_sweep(cfg, out);
    if (*zw) return cmd_zero_wait(cfg);
    return cmd_simulate(cfg, seed, out, trajectory);
  } catch (const aoi::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalid;
  } catch (const aoi::DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalid;
  } catch (const SolverFailure& e) {
    std::cerr << "solver error: " << e.what() << '\n';
    return kSolverFailed;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalid;
  }
}
