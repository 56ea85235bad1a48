#pragma once

// Optimal waiting policies for the average age-penalty problem
//
//   minimize   E[q(Y, z(Y), Y')] / E[Y + z(Y)]
//   subject to E[Y + z(Y)] >= 1 / f_max,  0 <= z(y) <= M.
//
// solve_general is the two-layer bisection: the outer layer searches the
// ratio level c (the optimum is <= c exactly when f(c) <= 0), the inner layer
// searches the multiplier zeta of the frequency constraint, and the policy for
// a given (c, zeta) is the threshold rule z_nu with nu = c + zeta.
// solve_water_filling handles the linear-penalty i.i.d. case through the
// water level beta.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "aoi/errors.hpp"
#include "aoi/penalty.hpp"
#include "aoi/policy.hpp"
#include "aoi/ttime.hpp"

namespace aoi {

struct SolverConfig {
  double max_wait = 10.0;
  /// 1 / f_max; 0 means f_max is infinite (no frequency constraint).
  double min_mean_interval = 0.0;
  double eps_outer = 1e-8;
  double eps_inner = 1e-8;
  std::size_t y_grid = 256;

  static SolverConfig with_f_max(double f_max, double max_wait = 10.0) {
    SolverConfig cfg;
    cfg.max_wait = max_wait;
    cfg.min_mean_interval = std::isinf(f_max) ? 0.0 : 1.0 / f_max;
    return cfg;
  }

  double f_max() const {
    return min_mean_interval == 0.0 ? std::numeric_limits<double>::infinity() : 1.0 / min_mean_interval;
  }

  void validate() const {
    if (!std::isfinite(max_wait) || !(max_wait > 0.0)) throw DomainError("solver: M must be finite and > 0");
    if (!std::isfinite(min_mean_interval) || min_mean_interval < 0.0)
      throw DomainError("solver: 1/f_max must be finite and >= 0");
    if (!(max_wait > min_mean_interval)) throw DomainError("solver: M must exceed 1/f_max");
    if (!(eps_outer > 0.0) || !(eps_inner > 0.0)) throw DomainError("solver: tolerances must be > 0");
    if (y_grid < 2) throw DomainError("solver: y_grid must be >= 2");
  }
};

struct Dual {
  std::optional<double> c;
  std::optional<double> zeta;
  std::optional<double> beta;
};

struct SolveResult {
  Policy policy;
  double g_opt;
  Dual dual;
  bool constraint_active;
  std::size_t outer_iterations = 0;
  std::size_t inner_iterations = 0;
};

struct FOfC {
  double f_value;
  double zeta;
  Policy policy;
  std::size_t inner_iterations;
};

namespace detail {

// Stationary points of Y with the conditional law of Y' at each of them.
struct Discretization {
  PointSet outer;
  std::vector<PointSet> next;

  explicit Discretization(const TransmissionModel& model) : outer(model.stationary_points()) {
    next.reserve(outer.size());
    for (const auto& p : outer) next.push_back(model.conditional_points(p.value));
  }
};

struct PolicyMoments {
  double penalty;  // E[q(Y, z(Y), Y')]
  double period;   // E[Y + z(Y)]
};

template <typename WaitFn>
PolicyMoments policy_moments(const Discretization& d, const PenaltyFunction& pf, WaitFn&& wait_at) {
  PolicyMoments m{0.0, 0.0};
  for (std::size_t i = 0; i < d.outer.size(); ++i) {
    const double y = d.outer[i].value;
    const double z = wait_at(i, y);
    const double base = pf.antiderivative(y);
    double inner = 0.0;
    for (const auto& p : d.next[i]) inner += p.weight * std::max(0.0, pf.antiderivative(y + z + p.value) - base);
    m.penalty += d.outer[i].weight * inner;
    m.period += d.outer[i].weight * (y + z);
  }
  return m;
}

inline double ratio(const PolicyMoments& m) {
  if (!(m.period > 0.0)) throw DegenerateModelError("E[Y + z(Y)] is zero; average penalty undefined");
  return m.penalty / m.period;
}

inline PolicyMoments threshold_moments(const Discretization& d, const PenaltyFunction& pf, double nu,
                                       double max_wait, double tolerance) {
  return policy_moments(d, pf, [&](std::size_t i, double y) {
    return threshold_wait(y, d.next[i], nu, pf, max_wait, tolerance);
  });
}

inline void require_stationary(const TransmissionModel& model) {
  if (model.is_trace()) throw UnsupportedModelError("solvers and the analytic objective need a stationary model");
}

}  // namespace detail

/// E[q(Y, z(Y), Y')] / E[Y + z(Y)] under the stationary law.
namespace detail {

// Exponential penalties against heavy or matching tails have infinite mean;
// quadrature would quietly return a finite number.
inline void require_light_tail(const TransmissionModel& model, const PenaltyFunction& pf) {
  if (const auto* e = std::get_if<penalty_kind::Exponential>(&pf.kind()); e && e->alpha > 0.0) {
    if (model.is<model_kind::LogNormalAR1>())
      throw UnboundedPenaltyError("exponential penalty has infinite mean under log-normal transmission times");
    if (const auto* ex = std::get_if<model_kind::ExponentialIID>(&model.kind()); ex && e->alpha >= ex->rate)
      throw UnboundedPenaltyError("exponential penalty rate must be below the transmission-time rate");
  }
}

}  // namespace detail

inline double objective_eval(const Policy& policy, const TransmissionModel& model, const PenaltyFunction& pf) {
  detail::require_stationary(model);
  detail::require_light_tail(model, pf);
  const detail::Discretization d(model);
  return detail::ratio(detail::policy_moments(d, pf, [&](std::size_t, double y) { return policy.wait(y); }));
}

/// E[Y + z(Y)] under the stationary law.
inline double mean_period(const Policy& policy, const TransmissionModel& model) {
  detail::require_stationary(model);
  return stationary_expect(model, [&](double y) { return y + policy.wait(y); });
}

/// Throws UnboundedPenaltyError when E[q(Y, M, Y')] is not finite.
inline void check_bounded_penalty(const TransmissionModel& model, const PenaltyFunction& pf, double max_wait) {
  detail::require_light_tail(model, pf);
  const detail::Discretization d(model);
  const auto m = detail::policy_moments(d, pf, [&](std::size_t, double) { return max_wait; });
  if (!std::isfinite(m.penalty)) throw UnboundedPenaltyError("E[q(Y, M, Y')] is not finite");
}

namespace detail {

inline FOfC f_of_c(double c, const SolverConfig& cfg, const Discretization& d, const TransmissionModel& model,
                   const PenaltyFunction& pf) {
  const double tol = cfg.eps_inner / 10.0;
  const double target = cfg.min_mean_interval;
  double zeta = 0.0;
  std::size_t iterations = 0;
  PolicyMoments m = threshold_moments(d, pf, c, cfg.max_wait, tol);
  if (m.period < target) {
    double zeta_u = 1.0;
    PolicyMoments mu = threshold_moments(d, pf, c + zeta_u, cfg.max_wait, tol);
    while (mu.period < target) {
      zeta_u *= 2.0;
      if (!std::isfinite(c + zeta_u))
        throw InfeasibleError("frequency constraint unattainable even with the maximum wait");
      mu = threshold_moments(d, pf, c + zeta_u, cfg.max_wait, tol);
      ++iterations;
    }
    double zeta_l = 0.0;
    while (zeta_u - zeta_l > cfg.eps_inner) {
      const double mid = 0.5 * (zeta_l + zeta_u);
      const PolicyMoments mm = threshold_moments(d, pf, c + mid, cfg.max_wait, tol);
      if (mm.period >= target) {
        zeta_u = mid;
        mu = mm;
      } else {
        zeta_l = mid;
      }
      ++iterations;
    }
    zeta = zeta_u;
    // A flat stretch of E[g(y + z + Y')] makes z_nu jump across the target.
    // Both sides minimize the same Lagrangian, so blend them to hit it exactly.
    const PolicyMoments ml = threshold_moments(d, pf, c + zeta_l, cfg.max_wait, tol);
    if (mu.period - target > cfg.eps_inner && ml.period < target) {
      const double blend = (target - ml.period) / (mu.period - ml.period);
      const Policy p = Policy::blended_threshold(c + zeta_l, c + zeta_u, blend, model, pf, cfg.max_wait, tol);
      m = policy_moments(d, pf, [&](std::size_t, double y) { return p.wait(y); });
      return {m.penalty - c * m.period, zeta, p, iterations};
    }
    m = mu;
  }
  return {m.penalty - c * m.period, zeta, Policy::threshold(c + zeta, model, pf, cfg.max_wait, tol), iterations};
}

inline void require_feasible(const TransmissionModel& model, const SolverConfig& cfg) {
  const double mean = moments_and_support(model).mean;
  if (mean + cfg.max_wait < cfg.min_mean_interval)
    throw InfeasibleError("E[Y] + M is below 1/f_max; no policy meets the frequency constraint");
}

}  // namespace detail

/// f(c) = min over feasible z of E[q] - c E[Y + z], attained by z_nu with nu = c + zeta.
inline FOfC f_of_c(double c, const SolverConfig& cfg, const TransmissionModel& model, const PenaltyFunction& pf) {
  cfg.validate();
  detail::require_stationary(model);
  if (!(c >= 0.0)) throw DomainError("f_of_c: c must be >= 0");
  detail::require_feasible(model, cfg);
  const detail::Discretization d(model);
  return detail::f_of_c(c, cfg, d, model, pf);
}

enum class ReferenceKind { ZeroWait, ConstantWait, MinimumWait };

/// Zero-wait, constant-wait (E[Y + Z] = 1/f_max) or minimum-wait (water-filling
/// with E[z(Y)] = 1/f_max - E[Y]) reference policies.
inline Policy reference_policy(ReferenceKind kind, const SolverConfig& cfg, const TransmissionModel& model) {
  cfg.validate();
  detail::require_stationary(model);
  const double mean = moments_and_support(model).mean;
  const double target_wait = cfg.min_mean_interval - mean;
  switch (kind) {
    case ReferenceKind::ZeroWait:
      return Policy::zero_wait(cfg.max_wait);
    case ReferenceKind::ConstantWait:
      if (target_wait <= 0.0) return Policy::zero_wait(cfg.max_wait);
      return Policy::constant_wait(target_wait, cfg.max_wait);
    case ReferenceKind::MinimumWait:
      break;
  }
  if (!model.is_iid()) throw UnsupportedModelError("minimum-wait policy needs i.i.d. transmission times");
  if (target_wait <= 0.0) return Policy::zero_wait(cfg.max_wait);
  auto mean_wait = [&](double beta) {
    return stationary_expect(model, [&](double y) { return std::clamp(beta - y, 0.0, cfg.max_wait); });
  };
  double lo = 0.0;
  double hi = mean + cfg.max_wait;
  while (mean_wait(hi) < target_wait) {
    hi *= 2.0;
    if (!std::isfinite(hi)) throw InfeasibleError("minimum-wait target exceeds the reachable mean wait");
  }
  while (hi - lo > cfg.eps_inner) {
    const double mid = 0.5 * (lo + hi);
    if (mean_wait(mid) >= target_wait) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return Policy::water_filling(hi, cfg.max_wait);
}

/// Two-layer bisection for general non-decreasing penalties and Markov transmission times.
inline SolveResult solve_general(const SolverConfig& cfg, const TransmissionModel& model, const PenaltyFunction& pf) {
  cfg.validate();
  detail::require_stationary(model);
  detail::require_feasible(model, cfg);
  check_bounded_penalty(model, pf, cfg.max_wait);
  const detail::Discretization d(model);

  const double mean = moments_and_support(model).mean;
  const Policy reference = mean >= cfg.min_mean_interval
                               ? Policy::zero_wait(cfg.max_wait)
                               : Policy::constant_wait(cfg.min_mean_interval - mean, cfg.max_wait);
  const double reference_value =
      detail::ratio(detail::policy_moments(d, pf, [&](std::size_t, double y) { return reference.wait(y); }));
  if (reference_value <= 0.0) {
    // Penalty vanishes on every reachable age: nothing to improve on.
    return {reference, 0.0, Dual{0.0, 0.0, std::nullopt}, false, 0, 0};
  }

  SolveResult out{reference, reference_value, {}, false};
  double lo = 0.0;
  double hi = reference_value;
  FOfC at_hi = detail::f_of_c(hi, cfg, d, model, pf);
  out.inner_iterations += at_hi.inner_iterations;
  while (at_hi.f_value > 0.0) {
    hi *= 2.0;
    at_hi = detail::f_of_c(hi, cfg, d, model, pf);
    out.inner_iterations += at_hi.inner_iterations;
  }
  while (hi - lo > cfg.eps_outer) {
    const double c = 0.5 * (lo + hi);
    FOfC at_c = detail::f_of_c(c, cfg, d, model, pf);
    out.inner_iterations += at_c.inner_iterations;
    ++out.outer_iterations;
    if (at_c.f_value <= 0.0) {
      hi = c;
      at_hi = std::move(at_c);
    } else {
      lo = c;
    }
  }
  out.policy = at_hi.policy;
  out.g_opt = hi;
  out.dual = Dual{hi, at_hi.zeta, std::nullopt};
  out.constraint_active = at_hi.zeta > 0.0;
  return out;
}

namespace detail {

struct WaterLevelMoments {
  double first;   // E[Y + z(Y)]
  double second;  // E[(Y + z(Y))^2]
};

inline WaterLevelMoments water_level_moments(const TransmissionModel& model, double beta, double max_wait) {
  WaterLevelMoments m{0.0, 0.0};
  for (const auto& p : model.stationary_points()) {
    const double period = p.value + std::clamp(beta - p.value, 0.0, max_wait);
    m.first += p.weight * period;
    m.second += p.weight * period * period;
  }
  return m;
}

}  // namespace detail

/// Water-filling solution z(y) = clamp(beta - y, 0, M) for g(x) = x and i.i.d. transmission times.
inline SolveResult solve_water_filling(const SolverConfig& cfg, const TransmissionModel& model,
                                       const PenaltyFunction& pf) {
  cfg.validate();
  detail::require_stationary(model);
  if (!model.is_iid()) throw UnsupportedModelError("water-filling solution needs i.i.d. transmission times");
  if (!pf.is_linear()) throw DomainError("water-filling solution needs the linear penalty g(x) = x");
  const double mean = moments_and_support(model).mean;
  if (!(mean > 0.0)) throw DomainError("water-filling solution needs E[Y] > 0");
  detail::require_feasible(model, cfg);

  const double target = cfg.min_mean_interval;
  auto gap = [&](double beta) {
    const auto m = detail::water_level_moments(model, beta, cfg.max_wait);
    return m.first - std::max(target, m.second / (2.0 * beta));
  };
  SolveResult out{Policy::zero_wait(cfg.max_wait), 0.0, {}, false};
  double lo = std::numeric_limits<double>::min();
  double hi = mean + cfg.max_wait;
  while (gap(hi) < 0.0) {
    hi *= 2.0;
    if (!std::isfinite(hi)) throw InfeasibleError("water level bracket diverged");
  }
  while (hi - lo > cfg.eps_outer) {
    const double beta = 0.5 * (lo + hi);
    if (gap(beta) >= 0.0) {
      hi = beta;
    } else {
      lo = beta;
    }
    ++out.outer_iterations;
  }
  const double beta = hi;
  const auto m = detail::water_level_moments(model, beta, cfg.max_wait);
  out.policy = Policy::water_filling(beta, cfg.max_wait);
  out.g_opt = m.second / (2.0 * m.first) + mean;
  out.dual = Dual{std::nullopt, std::nullopt, beta};
  out.constraint_active = target > 0.0 && target >= m.second / (2.0 * beta);
  return out;
}

enum class Verdict { Optimal, NotOptimal, Unknown };

inline std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Optimal: return "optimal";
    case Verdict::NotOptimal: return "not_optimal";
    default: return "unknown";
  }
}

struct ZeroWaitVerdict {
  Verdict verdict;
  std::string reason;
  /// Filled for the linear i.i.d. test: E[Y^2] and 2 y_inf E[Y].
  std::optional<double> second_moment;
  std::optional<double> bound;
  std::optional<double> y_inf;
};

/// Whether the zero-wait policy is optimal. Exact (necessary and sufficient) for
/// a linear penalty with i.i.d. transmission times; otherwise only sufficient
/// conditions are checked and the answer may be Unknown.
inline ZeroWaitVerdict zero_wait_optimal(const TransmissionModel& model, const PenaltyFunction& pf,
                                         const SolverConfig& cfg) {
  detail::require_stationary(model);
  const Moments m = moments_and_support(model);
  if (m.mean < cfg.min_mean_interval)
    throw InfeasibleError("zero-wait policy violates the frequency constraint (E[Y] < 1/f_max)");

  if (pf.is_linear() && model.is_iid()) {
    const double bound = 2.0 * m.y_inf * m.mean;
    const bool optimal = m.second_moment <= bound * (1.0 + 1e-12);
    return {optimal ? Verdict::Optimal : Verdict::NotOptimal, "second_moment_test", m.second_moment, bound, m.y_inf};
  }
  if (model.has_finite_support() && !model.is<model_kind::ConstantTime>()) {
    try {
      if (lag1_correlation(model) <= -1.0 + 1e-12) return {Verdict::Optimal, "negative_unit_correlation", {}, {}, {}};
    } catch (const UndefinedCorrelationError&) {
    }
  } else if (model.is<model_kind::LogNormalAR1>() && lag1_correlation(model) <= -1.0 + 1e-12) {
    return {Verdict::Optimal, "negative_unit_correlation", {}, {}, {}};
  }
  if (model.stationary_points().size() == 1 || model.is<model_kind::ConstantTime>())
    return {Verdict::Optimal, "constant_transmission_time", {}, {}, {}};
  if (pf.is_constant()) return {Verdict::Optimal, "constant_penalty", {}, {}, {}};
  return {Verdict::Unknown, "no_sufficient_condition", {}, {}, {}};
}

/// (y, z(y)) samples of a policy: the support for finite models, a uniform grid
/// of `cfg.y_grid` points over the bulk of the law otherwise.
inline std::vector<WeightedPoint> tabulate_policy(const Policy& policy, const TransmissionModel& model,
                                                  const SolverConfig& cfg) {
  detail::require_stationary(model);
  std::vector<WeightedPoint> out;
  if (model.has_finite_support()) {
    for (const auto& p : model.stationary_points()) out.push_back({p.value, policy.wait(p.value)});
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.value < b.value; });
    return out;
  }
  const Moments m = moments_and_support(model);
  const double sd = std::sqrt(std::max(0.0, m.second_moment - m.mean * m.mean));
  const double top = m.mean + 5.0 * sd;
  const auto n = static_cast<double>(cfg.y_grid);
  for (std::size_t i = 1; i <= cfg.y_grid; ++i) {
    const double y = top * static_cast<double>(i) / n;
    out.push_back({y, policy.wait(y)});
  }
  return out;
}

}  // namespace aoi
