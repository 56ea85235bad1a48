#pragma once

// Stationary ergodic Markov transmission-time processes (Y_0, Y_1, ...).
//
// Every non-trace model exposes its stationary law and its one-step
// conditional law Y' | Y = y as finite sets of weighted points: exact for
// finite-state models, Gauss-Laguerre / Gauss-Hermite rules for the
// exponential and log-normal models. Solvers and the analytic objective take
// all expectations through these point sets.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <numeric>
#include <queue>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "aoi/errors.hpp"
#include "aoi/quadrature.hpp"

namespace aoi {

struct WeightedPoint {
  double value;
  double weight;
};

using PointSet = std::vector<WeightedPoint>;

namespace model_kind {

struct ConstantTime {
  double value;
};
struct FiniteIID {
  std::vector<double> values;
  std::vector<double> probs;
};
struct FiniteMarkov {
  std::vector<double> values;
  std::vector<std::vector<double>> transition;
  std::vector<double> stationary;
};
struct ExponentialIID {
  double rate;
};
/// Y = exp(sigma X - sigma^2 / 2) with X a unit-variance stationary AR(1): X' = eta X + sqrt(1 - eta^2) W.
struct LogNormalAR1 {
  double sigma;
  double eta;
};
/// Explicit sequence, cycled. Simulator-only.
struct Trace {
  std::vector<double> values;
};

}  // namespace model_kind

struct Moments {
  double mean;
  double second_moment;
  double y_inf;
};

inline constexpr std::size_t kDefaultQuadratureNodes = 64;
inline constexpr std::size_t kMaxQuadratureNodes = 160;

class TransmissionModel {
public:
  using Kind = std::variant<model_kind::ConstantTime, model_kind::FiniteIID, model_kind::FiniteMarkov,
                            model_kind::ExponentialIID, model_kind::LogNormalAR1, model_kind::Trace>;

  static TransmissionModel constant_time(double c) {
    if (!std::isfinite(c) || c <= 0.0) throw DomainError("constant transmission time must be > 0");
    return TransmissionModel(model_kind::ConstantTime{c});
  }

  static TransmissionModel finite_iid(std::vector<double> values, std::vector<double> probs) {
    check_values(values);
    if (probs.size() != values.size()) throw DomainError("finite_iid: values and probs differ in size");
    check_distribution(probs, "finite_iid probs");
    TransmissionModel m(model_kind::FiniteIID{std::move(values), std::move(probs)});
    m.require_positive_mean();
    return m;
  }

  /// Stationary distribution is computed from the transition matrix.
  static TransmissionModel finite_markov(std::vector<double> values, std::vector<std::vector<double>> transition) {
    check_values(values);
    const std::size_t n = values.size();
    if (transition.size() != n) throw DomainError("finite_markov: transition matrix must be square");
    for (const auto& row : transition) {
      if (row.size() != n) throw DomainError("finite_markov: transition matrix must be square");
      check_distribution(row, "finite_markov transition row");
    }
    if (!irreducible(transition)) throw DomainError("finite_markov: chain must be irreducible");
    auto pi = stationary_distribution(transition);
    TransmissionModel m(model_kind::FiniteMarkov{std::move(values), std::move(transition), std::move(pi)});
    m.require_positive_mean();
    return m;
  }

  /// Symmetric two-state chain: stay with probability p, switch with 1 - p.
  static TransmissionModel two_state(double p, double low = 0.0, double high = 2.0) {
    if (!(p >= 0.0 && p < 1.0)) throw DomainError("two_state: p must lie in [0, 1)");
    return finite_markov({low, high}, {{p, 1.0 - p}, {1.0 - p, p}});
  }

  static TransmissionModel exponential_iid(double rate) {
    if (!std::isfinite(rate) || rate <= 0.0) throw DomainError("exponential rate must be > 0");
    return TransmissionModel(model_kind::ExponentialIID{rate});
  }

  static TransmissionModel lognormal_ar1(double sigma, double eta) {
    if (!std::isfinite(sigma) || sigma <= 0.0) throw DomainError("lognormal sigma must be > 0");
    if (!(eta > -1.0 && eta < 1.0)) throw DomainError("lognormal eta must lie in (-1, 1)");
    return TransmissionModel(model_kind::LogNormalAR1{sigma, eta});
  }

  static TransmissionModel trace(std::vector<double> values) {
    check_values(values);
    return TransmissionModel(model_kind::Trace{std::move(values)});
  }

  /// Copy with a different quadrature order for the continuous kinds.
  TransmissionModel with_quadrature_nodes(std::size_t n) const {
    if (n < 2 || n > kMaxQuadratureNodes)
      throw DomainError("quadrature_nodes must lie in [2, " + std::to_string(kMaxQuadratureNodes) + "]");
    TransmissionModel m = *this;
    m.nodes_ = n;
    m.build_rules();
    return m;
  }

  const Kind& kind() const noexcept { return kind_; }
  std::size_t quadrature_nodes() const noexcept { return nodes_; }

  template <typename K>
  bool is() const noexcept {
    return std::holds_alternative<K>(kind_);
  }

  bool is_trace() const noexcept { return is<model_kind::Trace>(); }

  /// Successive transmission times are independent.
  bool is_iid() const noexcept {
    if (is<model_kind::LogNormalAR1>()) return std::get<model_kind::LogNormalAR1>(kind_).eta == 0.0;
    if (is<model_kind::FiniteMarkov>()) return markov_rows_identical();
    return is<model_kind::ConstantTime>() || is<model_kind::FiniteIID>() || is<model_kind::ExponentialIID>();
  }

  /// Finite state space: expectations are exact sums.
  bool has_finite_support() const noexcept {
    return is<model_kind::ConstantTime>() || is<model_kind::FiniteIID>() || is<model_kind::FiniteMarkov>();
  }

  std::string name() const {
    switch (kind_.index()) {
      case 0: return "constant";
      case 1: return "finite_iid";
      case 2: return "finite_markov";
      case 3: return "exponential";
      case 4: return "lognormal_ar1";
      default: return "trace";
    }
  }

  /// Stationary law as weighted points. Throws for Trace.
  const PointSet& stationary_points() const {
    require_not_trace("stationary law");
    return stationary_;
  }

  /// Law of Y' given Y = y as weighted points.
  PointSet conditional_points(double y) const {
    require_not_trace("conditional law");
    return std::visit(
        [&](const auto& k) -> PointSet {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, model_kind::FiniteMarkov>) {
            const std::size_t i = state_index(k.values, y);
            PointSet out;
            out.reserve(k.values.size());
            for (std::size_t j = 0; j < k.values.size(); ++j)
              if (k.transition[i][j] > 0.0) out.push_back({k.values[j], k.transition[i][j]});
            return out;
          } else if constexpr (std::is_same_v<K, model_kind::ConstantTime>) {
            if (!near(y, k.value)) throw DomainError("conditional_expect: state not in support");
            return stationary_;
          } else if constexpr (std::is_same_v<K, model_kind::FiniteIID>) {
            (void)state_index(k.values, y);
            return stationary_;
          } else if constexpr (std::is_same_v<K, model_kind::ExponentialIID>) {
            if (!(y >= 0.0)) throw DomainError("conditional_expect: state must be >= 0");
            return stationary_;
          } else if constexpr (std::is_same_v<K, model_kind::LogNormalAR1>) {
            if (!(y > 0.0) || !std::isfinite(y))
              throw DomainError("conditional_expect: log-normal state must be > 0");
            if (k.eta == 0.0) return stationary_;
            const double x = (std::log(y) + 0.5 * k.sigma * k.sigma) / k.sigma;
            const double sd = std::sqrt(1.0 - k.eta * k.eta);
            PointSet out(hermite_.nodes.size());
            for (std::size_t j = 0; j < out.size(); ++j) {
              const double xn = k.eta * x + sd * hermite_.nodes[j];
              out[j] = {std::exp(k.sigma * xn - 0.5 * k.sigma * k.sigma), hermite_.weights[j]};
            }
            return out;
          } else {
            return {};
          }
        },
        kind_);
  }

  /// Deterministic draw of n transmission times, started from the stationary law.
  std::vector<double> sample_path(std::size_t n, std::uint64_t seed) const {
    if (n == 0) throw DomainError("sample_path: n must be >= 1");
    std::vector<double> out(n);
    std::mt19937_64 rng(seed);
    std::visit(
        [&](const auto& k) {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, model_kind::ConstantTime>) {
            std::fill(out.begin(), out.end(), k.value);
          } else if constexpr (std::is_same_v<K, model_kind::FiniteIID>) {
            std::discrete_distribution<std::size_t> pick(k.probs.begin(), k.probs.end());
            for (auto& v : out) v = k.values[pick(rng)];
          } else if constexpr (std::is_same_v<K, model_kind::FiniteMarkov>) {
            std::vector<std::discrete_distribution<std::size_t>> rows;
            rows.reserve(k.values.size());
            for (const auto& row : k.transition) rows.emplace_back(row.begin(), row.end());
            std::discrete_distribution<std::size_t> initial(k.stationary.begin(), k.stationary.end());
            std::size_t s = initial(rng);
            out[0] = k.values[s];
            for (std::size_t i = 1; i < n; ++i) {
              s = rows[s](rng);
              out[i] = k.values[s];
            }
          } else if constexpr (std::is_same_v<K, model_kind::ExponentialIID>) {
            std::exponential_distribution<double> draw(k.rate);
            for (auto& v : out) v = draw(rng);
          } else if constexpr (std::is_same_v<K, model_kind::LogNormalAR1>) {
            std::normal_distribution<double> normal(0.0, 1.0);
            const double sd = std::sqrt(1.0 - k.eta * k.eta);
            const double shift = 0.5 * k.sigma * k.sigma;
            double x = normal(rng);
            out[0] = std::exp(k.sigma * x - shift);
            for (std::size_t i = 1; i < n; ++i) {
              x = k.eta * x + sd * normal(rng);
              out[i] = std::exp(k.sigma * x - shift);
            }
          } else {
            for (std::size_t i = 0; i < n; ++i) out[i] = k.values[i % k.values.size()];
          }
        },
        kind_);
    return out;
  }

private:
  explicit TransmissionModel(Kind kind) : kind_(std::move(kind)) { build_rules(); }

  static bool near(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b)); }

  static std::size_t state_index(const std::vector<double>& values, double y) {
    for (std::size_t i = 0; i < values.size(); ++i)
      if (near(y, values[i])) return i;
    throw DomainError("conditional_expect: state not in support");
  }

  static void check_values(const std::vector<double>& values) {
    if (values.empty()) throw DomainError("transmission model needs at least one value");
    for (double v : values)
      if (!std::isfinite(v) || v < 0.0) throw DomainError("transmission times must be finite and >= 0");
  }

  static void check_distribution(const std::vector<double>& p, const char* what) {
    double total = 0.0;
    for (double v : p) {
      if (!std::isfinite(v) || v < 0.0) throw DomainError(std::string(what) + " must be >= 0");
      total += v;
    }
    if (std::abs(total - 1.0) > 1e-12) throw DomainError(std::string(what) + " must sum to 1");
  }

  static bool irreducible(const std::vector<std::vector<double>>& P) {
    const std::size_t n = P.size();
    auto reaches_all = [&](bool reverse) {
      std::vector<bool> seen(n, false);
      std::queue<std::size_t> todo;
      todo.push(0);
      seen[0] = true;
      while (!todo.empty()) {
        const std::size_t i = todo.front();
        todo.pop();
        for (std::size_t j = 0; j < n; ++j) {
          const double p = reverse ? P[j][i] : P[i][j];
          if (p > 0.0 && !seen[j]) {
            seen[j] = true;
            todo.push(j);
          }
        }
      }
      return std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
    };
    return reaches_all(false) && reaches_all(true);
  }

  // Solves pi (P - I) = 0 with sum(pi) = 1.
  static std::vector<double> stationary_distribution(const std::vector<std::vector<double>>& P) {
    const auto n = static_cast<Eigen::Index>(P.size());
    Eigen::MatrixXd A(n + 1, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j)
        A(j, i) = P[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] - (i == j ? 1.0 : 0.0);
    A.row(n).setOnes();
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n + 1);
    b(n) = 1.0;
    Eigen::VectorXd pi = A.colPivHouseholderQr().solve(b);
    std::vector<double> out(static_cast<std::size_t>(n));
    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      out[static_cast<std::size_t>(i)] = std::max(0.0, pi(i));
      total += out[static_cast<std::size_t>(i)];
    }
    for (auto& v : out) v /= total;
    return out;
  }

  bool markov_rows_identical() const noexcept {
    const auto& k = std::get<model_kind::FiniteMarkov>(kind_);
    for (const auto& row : k.transition)
      for (std::size_t j = 0; j < row.size(); ++j)
        if (row[j] != k.transition.front()[j]) return false;
    return true;
  }

  void require_not_trace(const char* what) const {
    if (is_trace()) throw UnsupportedModelError(std::string(what) + " is not defined for trace models");
  }

  void require_positive_mean() const {
    double mean = 0.0;
    for (const auto& p : stationary_) mean += p.weight * p.value;
    if (!(mean > 0.0)) throw DomainError("transmission model must have a positive mean");
  }

  void build_rules() {
    stationary_.clear();
    std::visit(
        [&](const auto& k) {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, model_kind::ConstantTime>) {
            stationary_ = {{k.value, 1.0}};
          } else if constexpr (std::is_same_v<K, model_kind::FiniteIID>) {
            for (std::size_t i = 0; i < k.values.size(); ++i)
              if (k.probs[i] > 0.0) stationary_.push_back({k.values[i], k.probs[i]});
          } else if constexpr (std::is_same_v<K, model_kind::FiniteMarkov>) {
            for (std::size_t i = 0; i < k.values.size(); ++i)
              if (k.stationary[i] > 0.0) stationary_.push_back({k.values[i], k.stationary[i]});
          } else if constexpr (std::is_same_v<K, model_kind::ExponentialIID>) {
            const QuadratureRule rule = gauss_laguerre(nodes_);
            for (std::size_t i = 0; i < nodes_; ++i) stationary_.push_back({rule.nodes[i] / k.rate, rule.weights[i]});
          } else if constexpr (std::is_same_v<K, model_kind::LogNormalAR1>) {
            // Standard-normal rule: x = sqrt(2) t, weight w / sqrt(pi).
            const QuadratureRule rule = gauss_hermite(nodes_);
            hermite_.nodes.resize(nodes_);
            hermite_.weights.resize(nodes_);
            for (std::size_t i = 0; i < nodes_; ++i) {
              hermite_.nodes[i] = std::numbers::sqrt2 * rule.nodes[i];
              hermite_.weights[i] = rule.weights[i] * std::numbers::inv_sqrtpi;
            }
            for (std::size_t i = 0; i < nodes_; ++i)
              stationary_.push_back({std::exp(k.sigma * hermite_.nodes[i] - 0.5 * k.sigma * k.sigma), hermite_.weights[i]});
          }
        },
        kind_);
  }

  Kind kind_;
  std::size_t nodes_ = kDefaultQuadratureNodes;
  PointSet stationary_;
  QuadratureRule hermite_;  // standard-normal nodes, log-normal kind only
};

/// E[h(Y)] under the stationary law.
template <typename F>
double stationary_expect(const TransmissionModel& model, F&& h) {
  double total = 0.0;
  for (const auto& p : model.stationary_points()) total += p.weight * h(p.value);
  return total;
}

/// E[h(Y') | Y = y].
template <typename F>
double conditional_expect(const TransmissionModel& model, double y, F&& h) {
  double total = 0.0;
  for (const auto& p : model.conditional_points(y)) total += p.weight * h(p.value);
  return total;
}

inline Moments moments_and_support(const TransmissionModel& model) {
  const double mean = stationary_expect(model, [](double y) { return y; });
  const double second = stationary_expect(model, [](double y) { return y * y; });
  double y_inf = 0.0;
  if (model.has_finite_support()) {
    y_inf = std::numeric_limits<double>::infinity();
    for (const auto& p : model.stationary_points()) y_inf = std::min(y_inf, p.value);
  }
  // Exponential and log-normal laws put mass arbitrarily close to 0.
  return {mean, second, y_inf};
}

/// Corr(Y_i, Y_{i+1}) under the stationary law.
inline double lag1_correlation(const TransmissionModel& model) {
  if (model.is_trace()) throw UnsupportedModelError("lag-1 correlation is not defined for trace models");
  if (const auto* ln = std::get_if<model_kind::LogNormalAR1>(&model.kind())) {
    // Exact for the normalized log-normal AR(1); reduces to (e^eta - 1)/(e - 1) at sigma = 1.
    const double s2 = ln->sigma * ln->sigma;
    return std::expm1(ln->eta * s2) / std::expm1(s2);
  }
  const Moments m = moments_and_support(model);
  const double var = m.second_moment - m.mean * m.mean;
  if (model.is<model_kind::ConstantTime>() || !(var > 1e-14 * std::max(1.0, m.second_moment)))
    throw UndefinedCorrelationError("lag-1 correlation of a zero-variance process is undefined");
  if (model.is_iid()) return 0.0;
  const double cross = stationary_expect(model, [&](double y) {
    return y * conditional_expect(model, y, [](double yn) { return yn; });
  });
  return std::clamp((cross - m.mean * m.mean) / var, -1.0, 1.0);
}

}  // namespace aoi
