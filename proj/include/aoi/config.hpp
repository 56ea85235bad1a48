#pragma once

// JSON experiment configuration.
//
//   {
//     "model":   {"kind": "two_state", "params": {"p": 0.7}, "quadrature_nodes": 64},
//     "penalty": {"kind": "stair_step", "alpha": 1.0},
//     "solver":  {"M": 10, "f_max": "inf", "eps_outer": 1e-8, "eps_inner": 1e-8,
//                 "y_grid": 256, "algorithm": "auto"},
//     "policies": ["optimal", "zero_wait", "constant_wait", "minimum_wait"],
//     "sweep":   {"variable": "rho", "values": [-1, -0.5, 0, 0.4, 0.8]},
//     "simulation": {"n_stages": 100000, "replications": 20, "seed": 1, "policy": "optimal"},
//     "output":  "fig5.csv"
//   }

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "aoi/errors.hpp"
#include "aoi/penalty.hpp"
#include "aoi/policy.hpp"
#include "aoi/solver.hpp"
#include "aoi/ttime.hpp"

namespace aoi {

using json = nlohmann::json;

struct ModelSpec {
  std::string kind;
  json params = json::object();
  std::size_t quadrature_nodes = kDefaultQuadratureNodes;
};

struct PenaltySpec {
  std::string kind;
  double alpha = 1.0;
  double k = 1.0;
  std::vector<double> ages;
  std::vector<double> values;
};

struct SweepSpec {
  std::string variable;  // inv_f_max, rho, sigma or alpha
  std::vector<double> values;
};

/// A policy to simulate: a named policy or an explicit per-state wait table.
struct PolicySpec {
  std::string name = "optimal";
  std::vector<double> states;
  std::vector<double> waits;
};

struct SimulationSpec {
  std::size_t n_stages = 100000;
  std::size_t replications = 20;
  std::uint64_t seed = 1;
  PolicySpec policy;
  double time_step = 0.1;
};

enum class Algorithm { Auto, General, WaterFilling };

struct ExperimentConfig {
  ModelSpec model;
  PenaltySpec penalty;
  SolverConfig solver;
  Algorithm algorithm = Algorithm::Auto;
  std::vector<std::string> policies{"optimal", "zero_wait"};
  std::optional<SweepSpec> sweep;
  std::optional<SimulationSpec> simulation;
  std::string output;
};

namespace detail {

template <typename T>
T field(const json& obj, const std::string& key, const std::string& path, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ValidationError(path + "." + key, std::string("wrong type: ") + e.what());
  }
}

template <typename T>
T required(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.contains(key)) throw ValidationError(path + "." + key, "missing required field");
  return field<T>(obj, key, path, T{});
}

inline double finite_number(const json& obj, const std::string& key, const std::string& path, double fallback) {
  const double v = field<double>(obj, key, path, fallback);
  if (!std::isfinite(v)) throw ValidationError(path + "." + key, "must be finite");
  return v;
}

// Rebuilds a library object and reports its domain errors against a config path.
template <typename F>
auto at_path(const std::string& path, F&& build) {
  try {
    return build();
  } catch (const DomainError& e) {
    std::string what = e.what();
    // Library messages often carry their own "solver: " style prefix.
    if (const auto colon = what.find(": "); colon != std::string::npos && what.compare(0, colon, path) == 0)
      what.erase(0, colon + 2);
    throw ValidationError(path, what);
  }
}

inline std::vector<std::string> known_policies() { return {"optimal", "zero_wait", "constant_wait", "minimum_wait"}; }

}  // namespace detail

/// Builds the transmission model described by `spec`.
inline TransmissionModel build_model(const ModelSpec& spec) {
  const std::string path = "model.params";
  const json& p = spec.params;
  auto make = [&]() -> TransmissionModel {
    if (spec.kind == "constant") return TransmissionModel::constant_time(detail::required<double>(p, "value", path));
    if (spec.kind == "finite_iid")
      return TransmissionModel::finite_iid(detail::required<std::vector<double>>(p, "values", path),
                                           detail::required<std::vector<double>>(p, "probs", path));
    if (spec.kind == "finite_markov")
      return TransmissionModel::finite_markov(detail::required<std::vector<double>>(p, "values", path),
                                              detail::required<std::vector<std::vector<double>>>(p, "transition", path));
    if (spec.kind == "two_state") {
      const auto values = detail::field<std::vector<double>>(p, "values", path, {0.0, 2.0});
      if (values.size() != 2) throw ValidationError(path + ".values", "two_state needs exactly two values");
      return TransmissionModel::two_state(detail::required<double>(p, "p", path), values[0], values[1]);
    }
    if (spec.kind == "exponential") return TransmissionModel::exponential_iid(detail::required<double>(p, "rate", path));
    if (spec.kind == "lognormal_ar1") {
      const double sigma = detail::required<double>(p, "sigma", path);
      // sigma = 0 is the degenerate limit Y = 1.
      if (sigma == 0.0) return TransmissionModel::constant_time(1.0);
      return TransmissionModel::lognormal_ar1(sigma, detail::field<double>(p, "eta", path, 0.0));
    }
    if (spec.kind == "trace") return TransmissionModel::trace(detail::required<std::vector<double>>(p, "values", path));
    throw ValidationError("model.kind", "unknown model kind '" + spec.kind + "'");
  };
  return detail::at_path(path, [&] {
    TransmissionModel m = make();
    return m.with_quadrature_nodes(spec.quadrature_nodes);
  });
}

inline PenaltyFunction build_penalty(const PenaltySpec& spec) {
  return detail::at_path("penalty", [&]() -> PenaltyFunction {
    if (spec.kind == "linear") return PenaltyFunction::linear();
    if (spec.kind == "power") return PenaltyFunction::power(spec.alpha);
    if (spec.kind == "exponential") return PenaltyFunction::exponential(spec.alpha);
    if (spec.kind == "stair_step") return PenaltyFunction::stair_step(spec.alpha);
    if (spec.kind == "constant") return PenaltyFunction::constant(spec.k);
    if (spec.kind == "custom") return PenaltyFunction::custom(spec.ages, spec.values);
    throw ValidationError("penalty.kind", "unknown penalty kind '" + spec.kind + "'");
  });
}

/// Applies one sweep value to copies of the model, penalty and solver settings.
inline void apply_sweep_value(const std::string& variable, double value, ModelSpec& model, PenaltySpec& penalty,
                              SolverConfig& solver) {
  if (variable == "inv_f_max") {
    solver.min_mean_interval = value;
  } else if (variable == "alpha") {
    penalty.alpha = value;
  } else if (variable == "sigma") {
    if (model.kind != "lognormal_ar1") throw ValidationError("sweep.variable", "sigma sweeps need a lognormal_ar1 model");
    model.params["sigma"] = value;
  } else if (variable == "rho") {
    if (model.kind == "two_state") {
      model.params["p"] = 0.5 * (value + 1.0);
    } else if (model.kind == "lognormal_ar1") {
      // Invert rho = (e^{eta sigma^2} - 1) / (e^{sigma^2} - 1).
      const double sigma = detail::required<double>(model.params, "sigma", "model.params");
      const double s2 = sigma * sigma;
      const double arg = 1.0 + value * std::expm1(s2);
      if (!(arg > 0.0)) throw ValidationError("sweep.values", "rho below the reachable range for this sigma");
      model.params["eta"] = std::log(arg) / s2;
    } else {
      throw ValidationError("sweep.variable", "rho sweeps need a two_state or lognormal_ar1 model");
    }
  } else {
    throw ValidationError("sweep.variable", "unknown sweep variable '" + variable + "'");
  }
}

inline void validate_sweep_value(const std::string& variable, double value) {
  const std::string path = "sweep.values";
  if (!std::isfinite(value)) throw ValidationError(path, "values must be finite");
  if (variable == "rho" && !(value >= -1.0 && value < 1.0)) throw ValidationError(path, "rho must lie in [-1, 1)");
  if (variable == "sigma" && !(value >= 0.0)) throw ValidationError(path, "sigma must be >= 0");
  if (variable == "alpha" && !(value >= 0.0)) throw ValidationError(path, "alpha must be >= 0");
  if (variable == "inv_f_max" && !(value >= 0.0)) throw ValidationError(path, "1/f_max must be >= 0");
}

inline PolicySpec parse_policy_spec(const json& j, const std::string& path) {
  PolicySpec spec;
  if (j.is_string()) {
    spec.name = j.get<std::string>();
  } else if (j.is_object()) {
    spec.name = detail::required<std::string>(j, "kind", path);
    if (spec.name != "state_table") throw ValidationError(path + ".kind", "object policies must be 'state_table'");
    spec.states = detail::required<std::vector<double>>(j, "states", path);
    spec.waits = detail::required<std::vector<double>>(j, "waits", path);
    if (spec.states.size() != spec.waits.size()) throw ValidationError(path, "states and waits differ in size");
    return spec;
  } else {
    throw ValidationError(path, "policy must be a name or an object");
  }
  const auto known = detail::known_policies();
  if (std::find(known.begin(), known.end(), spec.name) == known.end())
    throw ValidationError(path, "unknown policy '" + spec.name + "'");
  return spec;
}

/// Parses and validates an experiment configuration. Every sweep point is
/// instantiated once so domain errors surface here with their field path.
inline ExperimentConfig parse_experiment(const json& root) {
  if (!root.is_object()) throw ValidationError("$", "configuration must be a JSON object");
  ExperimentConfig cfg;

  const json model = detail::required<json>(root, "model", "$");
  cfg.model.kind = detail::required<std::string>(model, "kind", "model");
  cfg.model.params = detail::field<json>(model, "params", "model", json::object());
  if (!cfg.model.params.is_object()) throw ValidationError("model.params", "must be an object");
  cfg.model.quadrature_nodes = detail::field<std::size_t>(model, "quadrature_nodes", "model", kDefaultQuadratureNodes);

  const json penalty = detail::required<json>(root, "penalty", "$");
  cfg.penalty.kind = detail::required<std::string>(penalty, "kind", "penalty");
  cfg.penalty.alpha = detail::finite_number(penalty, "alpha", "penalty", 1.0);
  cfg.penalty.k = detail::finite_number(penalty, "k", "penalty", 1.0);
  if (penalty.contains("table")) {
    const auto table = detail::field<std::vector<std::vector<double>>>(penalty, "table", "penalty", {});
    for (const auto& row : table) {
      if (row.size() != 2) throw ValidationError("penalty.table", "rows must be [age, g]");
      cfg.penalty.ages.push_back(row[0]);
      cfg.penalty.values.push_back(row[1]);
    }
  }

  const json solver = detail::field<json>(root, "solver", "$", json::object());
  cfg.solver.max_wait = detail::finite_number(solver, "M", "solver", 10.0);
  if (solver.contains("inv_f_max")) {
    cfg.solver.min_mean_interval = detail::finite_number(solver, "inv_f_max", "solver", 0.0);
  } else if (solver.contains("f_max")) {
    const json& f = solver.at("f_max");
    if (f.is_string() && (f == "inf" || f == "infinity")) {
      cfg.solver.min_mean_interval = 0.0;
    } else if (f.is_number() && f.get<double>() > 0.0) {
      cfg.solver.min_mean_interval = 1.0 / f.get<double>();
    } else {
      throw ValidationError("solver.f_max", "must be a positive number or \"inf\"");
    }
  }
  cfg.solver.eps_outer = detail::finite_number(solver, "eps_outer", "solver", 1e-8);
  cfg.solver.eps_inner = detail::finite_number(solver, "eps_inner", "solver", 1e-8);
  cfg.solver.y_grid = detail::field<std::size_t>(solver, "y_grid", "solver", 256);
  const auto algorithm = detail::field<std::string>(solver, "algorithm", "solver", "auto");
  if (algorithm == "auto") cfg.algorithm = Algorithm::Auto;
  else if (algorithm == "general") cfg.algorithm = Algorithm::General;
  else if (algorithm == "water_filling") cfg.algorithm = Algorithm::WaterFilling;
  else throw ValidationError("solver.algorithm", "must be auto, general or water_filling");

  if (root.contains("policies")) {
    const json& list = root.at("policies");
    if (!list.is_array() || list.empty()) throw ValidationError("policies", "must be a non-empty array");
    cfg.policies.clear();
    for (std::size_t i = 0; i < list.size(); ++i)
      cfg.policies.push_back(parse_policy_spec(list[i], "policies[" + std::to_string(i) + "]").name);
  }

  if (root.contains("sweep")) {
    const json& s = root.at("sweep");
    SweepSpec sweep;
    sweep.variable = detail::required<std::string>(s, "variable", "sweep");
    sweep.values = detail::required<std::vector<double>>(s, "values", "sweep");
    if (sweep.values.empty()) throw ValidationError("sweep.values", "must not be empty");
    for (double v : sweep.values) validate_sweep_value(sweep.variable, v);
    cfg.sweep = std::move(sweep);
  }

  if (root.contains("simulation")) {
    const json& s = root.at("simulation");
    SimulationSpec sim;
    sim.n_stages = detail::field<std::size_t>(s, "n_stages", "simulation", sim.n_stages);
    sim.replications = detail::field<std::size_t>(s, "replications", "simulation", sim.replications);
    sim.seed = detail::field<std::uint64_t>(s, "seed", "simulation", sim.seed);
    sim.time_step = detail::finite_number(s, "time_step", "simulation", sim.time_step);
    if (s.contains("policy")) sim.policy = parse_policy_spec(s.at("policy"), "simulation.policy");
    if (sim.n_stages == 0) throw ValidationError("simulation.n_stages", "must be >= 1");
    if (sim.replications < 2) throw ValidationError("simulation.replications", "must be >= 2");
    if (!(sim.time_step > 0.0)) throw ValidationError("simulation.time_step", "must be > 0");
    cfg.simulation = sim;
  }

  cfg.output = detail::field<std::string>(root, "output", "$", "");

  // Instantiate the base point and every sweep point.
  auto check_point = [&](ModelSpec m, PenaltySpec p, SolverConfig s) {
    (void)build_model(m);
    (void)build_penalty(p);
    detail::at_path("solver", [&] {
      s.validate();
      return 0;
    });
  };
  if (cfg.sweep) {
    for (double v : cfg.sweep->values) {
      ModelSpec m = cfg.model;
      PenaltySpec p = cfg.penalty;
      SolverConfig s = cfg.solver;
      apply_sweep_value(cfg.sweep->variable, v, m, p, s);
      check_point(m, p, s);
    }
  } else {
    check_point(cfg.model, cfg.penalty, cfg.solver);
  }
  return cfg;
}

inline json policy_to_json(const Policy& policy) {
  json j{{"kind", policy.name()}, {"M", policy.max_wait()}};
  std::visit(
      [&](const auto& k) {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, policy_kind::ConstantWait>) j["wait"] = k.wait;
        else if constexpr (std::is_same_v<K, policy_kind::WaterFilling>) j["beta"] = k.beta;
        else if constexpr (std::is_same_v<K, policy_kind::Threshold>) {
          j["nu"] = k.nu;
          if (k.blend > 0.0) {
            j["nu_high"] = k.nu_high;
            j["blend"] = k.blend;
          }
        }
        else if constexpr (std::is_same_v<K, policy_kind::Tabulated>) j["grid"] = {{"y", k.ys}, {"z", k.zs}};
        else if constexpr (std::is_same_v<K, policy_kind::StateTable>) j["table"] = {{"y", k.states}, {"z", k.waits}};
      },
      policy.kind());
  return j;
}

/// Serializes a solve result with a sampled (y, z(y)) table.
inline json solve_result_to_json(const SolveResult& r, const TransmissionModel& model, const SolverConfig& cfg) {
  json dual = json::object();
  if (r.dual.c) dual["c"] = *r.dual.c;
  if (r.dual.zeta) dual["zeta"] = *r.dual.zeta;
  if (r.dual.beta) dual["beta"] = *r.dual.beta;
  json table = json::array();
  for (const auto& p : tabulate_policy(r.policy, model, cfg)) table.push_back({p.value, p.weight});
  return json{{"g_opt", r.g_opt},
              {"policy", policy_to_json(r.policy)},
              {"dual", dual},
              {"constraint_active", r.constraint_active},
              {"iterations", {{"outer", r.outer_iterations}, {"inner", r.inner_iterations}}},
              {"table", table}};
}

}  // namespace aoi
