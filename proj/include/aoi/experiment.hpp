#pragma once

// Config-driven experiments: policy comparisons over a parameter sweep,
// emitted as CSV rows.

#include <cmath>
#include <cstdio>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "aoi/config.hpp"
#include "aoi/simulator.hpp"
#include "aoi/solver.hpp"

namespace aoi {

struct ResultRow {
  std::optional<double> sweep_value;
  std::string policy;
  std::optional<double> analytic;
  std::optional<double> simulated_mean;
  std::optional<double> simulated_stderr;
  std::optional<bool> constraint_active;
  std::string error;
};

struct ExperimentResult {
  std::string sweep_variable;
  std::vector<ResultRow> rows;

  bool all_rows_failed() const {
    if (rows.empty()) return false;
    for (const auto& r : rows)
      if (r.error.empty()) return false;
    return true;
  }
};

/// Optimal policy: water-filling for a linear penalty with i.i.d. times under
/// Algorithm::Auto, the two-layer bisection otherwise.
inline SolveResult solve_optimal(const SolverConfig& cfg, const TransmissionModel& model, const PenaltyFunction& pf,
                                 Algorithm algorithm = Algorithm::Auto) {
  const bool water_filling =
      algorithm == Algorithm::WaterFilling || (algorithm == Algorithm::Auto && pf.is_linear() && model.is_iid());
  return water_filling ? solve_water_filling(cfg, model, pf) : solve_general(cfg, model, pf);
}

/// Resolves a policy by name. "optimal" solves the problem.
inline Policy make_policy(const PolicySpec& spec, const SolverConfig& cfg, const TransmissionModel& model,
                          const PenaltyFunction& pf, Algorithm algorithm = Algorithm::Auto) {
  if (spec.name == "state_table") return Policy::state_table(spec.states, spec.waits, cfg.max_wait);
  if (spec.name == "zero_wait") return reference_policy(ReferenceKind::ZeroWait, cfg, model);
  if (spec.name == "constant_wait") return reference_policy(ReferenceKind::ConstantWait, cfg, model);
  if (spec.name == "minimum_wait") return reference_policy(ReferenceKind::MinimumWait, cfg, model);
  return solve_optimal(cfg, model, pf, algorithm).policy;
}

inline ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  ExperimentResult result;
  std::vector<std::optional<double>> points;
  if (cfg.sweep) {
    result.sweep_variable = cfg.sweep->variable;
    for (double v : cfg.sweep->values) points.emplace_back(v);
  } else {
    points.emplace_back(std::nullopt);
  }

  for (std::size_t si = 0; si < points.size(); ++si) {
    ModelSpec model_spec = cfg.model;
    PenaltySpec penalty_spec = cfg.penalty;
    SolverConfig solver = cfg.solver;
    if (points[si]) apply_sweep_value(cfg.sweep->variable, *points[si], model_spec, penalty_spec, solver);
    const TransmissionModel model = build_model(model_spec);
    const PenaltyFunction pf = build_penalty(penalty_spec);

    std::optional<SolveResult> optimal;
    std::string optimal_error;
    try {
      optimal = solve_optimal(solver, model, pf, cfg.algorithm);
    } catch (const std::exception& e) {
      optimal_error = e.what();
    }

    for (std::size_t pi = 0; pi < cfg.policies.size(); ++pi) {
      const std::string& name = cfg.policies[pi];
      ResultRow row;
      row.sweep_value = points[si];
      row.policy = name;
      try {
        std::optional<Policy> policy;
        if (name == "optimal") {
          if (!optimal) throw std::runtime_error(optimal_error);
          policy = optimal->policy;
          row.constraint_active = optimal->constraint_active;
        } else {
          policy = make_policy(PolicySpec{name, {}, {}}, solver, model, pf, cfg.algorithm);
        }
        row.analytic = objective_eval(*policy, model, pf);
        if (cfg.simulation) {
          const std::uint64_t seed = derive_seed(cfg.simulation->seed, si * cfg.policies.size() + pi);
          const SimEstimate est =
              estimate(*policy, model, pf, cfg.simulation->n_stages, cfg.simulation->replications, seed);
          row.simulated_mean = est.mean_ratio;
          row.simulated_stderr = est.stderr_ratio;
        }
      } catch (const std::exception& e) {
        row.error = e.what();
      }
      result.rows.push_back(std::move(row));
    }
  }
  return result;
}

namespace detail {

inline std::string csv_number(const std::optional<double>& v) {
  if (!v) return "";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", *v);
  return buf;
}

inline std::string csv_text(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace detail

/// Columns: sweep_variable, sweep_value, policy, analytic, simulated_mean,
/// simulated_stderr, constraint_active, error. Empty cells for absent values.
inline void write_csv(std::ostream& os, const ExperimentResult& result) {
  os << "sweep_variable,sweep_value,policy,analytic,simulated_mean,simulated_stderr,constraint_active,error\n";
  for (const auto& r : result.rows) {
    os << result.sweep_variable << ',' << detail::csv_number(r.sweep_value) << ',' << r.policy << ','
       << detail::csv_number(r.analytic) << ',' << detail::csv_number(r.simulated_mean) << ','
       << detail::csv_number(r.simulated_stderr) << ','
       << (r.constraint_active ? (*r.constraint_active ? "true" : "false") : "") << ','
       << detail::csv_text(r.error) << '\n';
  }
}

/// Columns: i, Y, Z, Q, D (D is the delivery time D_i that starts stage i).
inline void write_path_csv(std::ostream& os, const SamplePath& path) {
  os << "i,Y,Z,Q,D\n";
  for (std::size_t i = 0; i < path.stages(); ++i) {
    os << i << ',' << detail::csv_number(path.transmission[i]) << ',' << detail::csv_number(path.waits[i]) << ','
       << detail::csv_number(path.penalties[i]) << ',' << detail::csv_number(path.deliveries[i]) << '\n';
  }
}

inline void write_trajectory_csv(std::ostream& os, const std::vector<TrajectoryPoint>& points) {
  os << "t,delta,g_delta\n";
  for (const auto& p : points)
    os << detail::csv_number(p.t) << ',' << detail::csv_number(p.age) << ',' << detail::csv_number(p.penalty) << '\n';
}

/// Zero-wait optimality report for the base point of a configuration.
inline json check_zero_wait(const ExperimentConfig& cfg) {
  const TransmissionModel model = build_model(cfg.model);
  const PenaltyFunction pf = build_penalty(cfg.penalty);
  const ZeroWaitVerdict v = zero_wait_optimal(model, pf, cfg.solver);
  const Moments m = moments_and_support(model);
  json report{{"verdict", to_string(v.verdict)}, {"reason", v.reason}, {"mean", m.mean}};
  if (v.second_moment) report["second_moment"] = *v.second_moment;
  if (v.bound) report["two_y_inf_mean"] = *v.bound;
  if (v.y_inf) report["y_inf"] = *v.y_inf;
  return report;
}

}  // namespace aoi
