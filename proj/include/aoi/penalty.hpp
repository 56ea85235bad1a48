#pragma once

// Age penalty functions g and the stage penalty q(y, z, y') = G(y+z+y') - G(y),
// where G is the antiderivative of g with G(0) = 0.

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "aoi/errors.hpp"

namespace aoi {

namespace penalty_kind {

struct Linear {};
struct Power {
  double alpha;
};
struct Exponential {
  double alpha;
};
struct StairStep {
  double alpha;
};
struct Constant {
  double k;
};
/// Non-decreasing tabulation, linearly interpolated and held flat past the last knot.
struct Custom {
  std::vector<double> ages;
  std::vector<double> values;
  std::vector<double> cumulative;  // integral of g from 0 to ages[i]
};

}  // namespace penalty_kind

class PenaltyFunction {
public:
  using Kind = std::variant<penalty_kind::Linear, penalty_kind::Power, penalty_kind::Exponential,
                            penalty_kind::StairStep, penalty_kind::Constant, penalty_kind::Custom>;

  static PenaltyFunction linear() { return PenaltyFunction(penalty_kind::Linear{}); }

  static PenaltyFunction power(double alpha) {
    require_non_negative(alpha, "power alpha");
    return PenaltyFunction(penalty_kind::Power{alpha});
  }

  static PenaltyFunction exponential(double alpha) {
    require_non_negative(alpha, "exponential alpha");
    return PenaltyFunction(penalty_kind::Exponential{alpha});
  }

  static PenaltyFunction stair_step(double alpha) {
    require_non_negative(alpha, "stair-step alpha");
    return PenaltyFunction(penalty_kind::StairStep{alpha});
  }

  static PenaltyFunction constant(double k) {
    require_non_negative(k, "constant k");
    return PenaltyFunction(penalty_kind::Constant{k});
  }

  /// Tabulated g. `ages` must start at 0 and be strictly increasing; `values`
  /// must be non-negative and non-decreasing.
  static PenaltyFunction custom(std::vector<double> ages, std::vector<double> values) {
    if (ages.empty() || ages.size() != values.size())
      throw DomainError("custom penalty: ages and values must be non-empty and equally sized");
    if (ages.front() != 0.0) throw DomainError("custom penalty: first age must be 0");
    for (std::size_t i = 0; i < ages.size(); ++i) {
      if (!std::isfinite(ages[i]) || !std::isfinite(values[i]) || values[i] < 0.0)
        throw DomainError("custom penalty: values must be finite and non-negative");
      if (i > 0 && !(ages[i] > ages[i - 1]))
        throw DomainError("custom penalty: ages must be strictly increasing");
      if (i > 0 && values[i] < values[i - 1])
        throw DomainError("custom penalty: g must be non-decreasing");
    }
    std::vector<double> cumulative(ages.size(), 0.0);
    for (std::size_t i = 1; i < ages.size(); ++i)
      cumulative[i] = cumulative[i - 1] + 0.5 * (values[i] + values[i - 1]) * (ages[i] - ages[i - 1]);
    return PenaltyFunction(penalty_kind::Custom{std::move(ages), std::move(values), std::move(cumulative)});
  }

  const Kind& kind() const noexcept { return kind_; }

  template <typename K>
  bool is() const noexcept {
    return std::holds_alternative<K>(kind_);
  }

  bool is_linear() const noexcept { return is<penalty_kind::Linear>(); }

  /// True when g takes a single value on [0, inf).
  bool is_constant() const {
    return std::visit(
        [](const auto& k) -> bool {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, penalty_kind::Constant>) {
            return true;
          } else if constexpr (std::is_same_v<K, penalty_kind::Linear>) {
            return false;
          } else if constexpr (std::is_same_v<K, penalty_kind::Custom>) {
            return k.values.front() == k.values.back();
          } else {
            return k.alpha == 0.0;
          }
        },
        kind_);
  }

  std::string name() const {
    return std::visit(
        [](const auto& k) -> std::string {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, penalty_kind::Linear>) return "linear";
          else if constexpr (std::is_same_v<K, penalty_kind::Power>) return "power";
          else if constexpr (std::is_same_v<K, penalty_kind::Exponential>) return "exponential";
          else if constexpr (std::is_same_v<K, penalty_kind::StairStep>) return "stair_step";
          else if constexpr (std::is_same_v<K, penalty_kind::Constant>) return "constant";
          else return "custom";
        },
        kind_);
  }

  /// g(delta). No domain check; callers go through eval_g.
  double operator()(double delta) const {
    return std::visit(
        [delta](const auto& k) -> double {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, penalty_kind::Linear>) {
            return delta;
          } else if constexpr (std::is_same_v<K, penalty_kind::Power>) {
            return std::pow(delta, k.alpha);
          } else if constexpr (std::is_same_v<K, penalty_kind::Exponential>) {
            return std::expm1(k.alpha * delta);
          } else if constexpr (std::is_same_v<K, penalty_kind::StairStep>) {
            return std::floor(k.alpha * delta);
          } else if constexpr (std::is_same_v<K, penalty_kind::Constant>) {
            return k.k;
          } else {
            return custom_value(k, delta);
          }
        },
        kind_);
  }

  /// G(x) = integral of g over [0, x].
  double antiderivative(double x) const {
    return std::visit(
        [x](const auto& k) -> double {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, penalty_kind::Linear>) {
            return 0.5 * x * x;
          } else if constexpr (std::is_same_v<K, penalty_kind::Power>) {
            return std::pow(x, k.alpha + 1.0) / (k.alpha + 1.0);
          } else if constexpr (std::is_same_v<K, penalty_kind::Exponential>) {
            if (k.alpha == 0.0) return 0.0;
            return std::expm1(k.alpha * x) / k.alpha - x;
          } else if constexpr (std::is_same_v<K, penalty_kind::StairStep>) {
            if (k.alpha == 0.0) return 0.0;
            // g equals j on [j/alpha, (j+1)/alpha): full steps 0..m-1 plus the partial step m.
            const double m = std::floor(k.alpha * x);
            return m * (m - 1.0) / (2.0 * k.alpha) + m * (x - m / k.alpha);
          } else if constexpr (std::is_same_v<K, penalty_kind::Constant>) {
            return k.k * x;
          } else {
            return custom_integral(k, x);
          }
        },
        kind_);
  }

private:
  explicit PenaltyFunction(Kind kind) : kind_(std::move(kind)) {}

  static void require_non_negative(double v, const char* what) {
    if (!std::isfinite(v) || v < 0.0) throw DomainError(std::string(what) + " must be finite and >= 0");
  }

  static std::size_t custom_segment(const penalty_kind::Custom& k, double x) {
    // Index i with ages[i] <= x < ages[i+1].
    auto it = std::upper_bound(k.ages.begin(), k.ages.end(), x);
    return static_cast<std::size_t>(std::distance(k.ages.begin(), it)) - 1;
  }

  static double custom_value(const penalty_kind::Custom& k, double x) {
    if (x >= k.ages.back()) return k.values.back();
    const std::size_t i = custom_segment(k, x);
    const double t = (x - k.ages[i]) / (k.ages[i + 1] - k.ages[i]);
    return k.values[i] + t * (k.values[i + 1] - k.values[i]);
  }

  static double custom_integral(const penalty_kind::Custom& k, double x) {
    if (x >= k.ages.back()) return k.cumulative.back() + k.values.back() * (x - k.ages.back());
    const std::size_t i = custom_segment(k, x);
    return k.cumulative[i] + 0.5 * (k.values[i] + custom_value(k, x)) * (x - k.ages[i]);
  }

  Kind kind_;
};

inline double eval_g(const PenaltyFunction& pf, double delta) {
  if (!(delta >= 0.0)) throw DomainError("eval_g: age must be non-negative");
  return pf(delta);
}

inline double antiderivative_G(const PenaltyFunction& pf, double x) {
  if (!(x >= 0.0)) throw DomainError("antiderivative_G: argument must be non-negative");
  return pf.antiderivative(x);
}

/// Area under g over one inter-delivery segment: integral of g over [y, y + z + y_next].
inline double stage_penalty_q(const PenaltyFunction& pf, double y, double z, double y_next) {
  if (!(y >= 0.0) || !(z >= 0.0) || !(y_next >= 0.0))
    throw DomainError("stage_penalty_q: arguments must be non-negative");
  const double upper = y + z + y_next;
  if (upper == y) return 0.0;
  return std::max(0.0, pf.antiderivative(upper) - pf.antiderivative(y));
}

}  // namespace aoi
