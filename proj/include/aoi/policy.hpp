#pragma once

// Stationary deterministic waiting policies z(y) in [0, M].

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "aoi/errors.hpp"
#include "aoi/penalty.hpp"
#include "aoi/ttime.hpp"

namespace aoi {

/// Largest z in [0, max_wait] with E[g(y + z + Y') | Y = y] <= nu, where the
/// law of Y' is given by `next`. Returns 0 when even z = 0 violates the bound.
/// The conditional mean penalty is non-decreasing in z, so bisection applies;
/// the returned point is the upper end of the final bracket.
inline double threshold_wait(double y, const PointSet& next, double nu, const PenaltyFunction& pf,
                             double max_wait, double tolerance) {
  if (pf.is_linear()) {
    // E[y + z + Y'] <= nu has the explicit solution z <= nu - y - E[Y'].
    double mean_next = 0.0;
    for (const auto& p : next) mean_next += p.weight * p.value;
    return std::clamp(nu - y - mean_next, 0.0, max_wait);
  }
  auto expected_rate = [&](double z) {
    double total = 0.0;
    for (const auto& p : next) total += p.weight * pf(y + z + p.value);
    return total;
  };
  if (expected_rate(0.0) > nu) return 0.0;
  if (expected_rate(max_wait) <= nu) return max_wait;
  double lo = 0.0;
  double hi = max_wait;
  while (hi - lo > tolerance) {
    const double mid = 0.5 * (lo + hi);
    if (expected_rate(mid) <= nu) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return hi;
}

/// z_nu(y) for a state y of `model`.
inline double z_nu(double y, double nu, const TransmissionModel& model, const PenaltyFunction& pf, double max_wait,
                   double tolerance = 1e-9) {
  return threshold_wait(y, model.conditional_points(y), nu, pf, max_wait, tolerance);
}

namespace policy_kind {

struct ZeroWait {};

struct ConstantWait {
  double wait;
};

/// z(y) = clamp(beta - y, 0, M).
struct WaterFilling {
  double beta;
};

struct ThresholdContext {
  TransmissionModel model;
  PenaltyFunction pf;
  double tolerance;
  std::vector<WeightedPoint> table;  // (state, wait) for finite-support models
};

/// z(y) = (1 - blend) z_nu(y) + blend z_nu_high(y) for the stored model and penalty.
/// A nonzero blend appears when z_nu jumps across the frequency target; every
/// wait between the two rules is optimal for the same multiplier.
struct Threshold {
  double nu;
  std::shared_ptr<const ThresholdContext> context;
  double nu_high = nu;
  double blend = 0.0;
};

/// Linear interpolation through (ys, zs), held flat outside the grid.
struct Tabulated {
  std::vector<double> ys;
  std::vector<double> zs;
};

/// Exact per-state waits; undefined elsewhere. Used with trace fixtures.
struct StateTable {
  std::vector<double> states;
  std::vector<double> waits;
};

}  // namespace policy_kind

class Policy {
public:
  using Kind = std::variant<policy_kind::ZeroWait, policy_kind::ConstantWait, policy_kind::WaterFilling,
                            policy_kind::Threshold, policy_kind::Tabulated, policy_kind::StateTable>;

  static Policy zero_wait(double max_wait = std::numeric_limits<double>::infinity()) {
    return Policy(policy_kind::ZeroWait{}, max_wait);
  }

  static Policy constant_wait(double wait, double max_wait = std::numeric_limits<double>::infinity()) {
    if (!(wait >= 0.0) || wait > max_wait) throw DomainError("constant wait must lie in [0, M]");
    return Policy(policy_kind::ConstantWait{wait}, max_wait);
  }

  static Policy water_filling(double beta, double max_wait) {
    if (!std::isfinite(beta)) throw DomainError("water level must be finite");
    return Policy(policy_kind::WaterFilling{beta}, max_wait);
  }

  static Policy threshold(double nu, const TransmissionModel& model, const PenaltyFunction& pf, double max_wait,
                          double tolerance = 1e-9) {
    return blended_threshold(nu, nu, 0.0, model, pf, max_wait, tolerance);
  }

  static Policy blended_threshold(double nu, double nu_high, double blend, const TransmissionModel& model,
                                  const PenaltyFunction& pf, double max_wait, double tolerance = 1e-9) {
    if (model.is_trace()) throw UnsupportedModelError("threshold policies need a stationary model");
    if (!(blend >= 0.0 && blend <= 1.0) || !(nu_high >= nu)) throw DomainError("threshold blend out of range");
    auto ctx = std::make_shared<policy_kind::ThresholdContext>(policy_kind::ThresholdContext{model, pf, tolerance, {}});
    const policy_kind::Threshold k{nu, ctx, nu_high, blend};
    if (model.has_finite_support()) {
      for (const auto& p : model.stationary_points())
        ctx->table.push_back({p.value, blended_wait(k, p.value, max_wait)});
    }
    return Policy(k, max_wait);
  }

  static Policy tabulated(std::vector<double> ys, std::vector<double> zs, double max_wait) {
    if (ys.empty() || ys.size() != zs.size()) throw DomainError("tabulated policy: empty or mismatched grid");
    for (std::size_t i = 0; i < ys.size(); ++i) {
      if (i > 0 && !(ys[i] > ys[i - 1])) throw DomainError("tabulated policy: grid must be increasing");
      if (!(zs[i] >= 0.0) || zs[i] > max_wait) throw DomainError("tabulated policy: waits must lie in [0, M]");
    }
    return Policy(policy_kind::Tabulated{std::move(ys), std::move(zs)}, max_wait);
  }

  static Policy state_table(std::vector<double> states, std::vector<double> waits,
                            double max_wait = std::numeric_limits<double>::infinity()) {
    if (states.size() != waits.size()) throw DomainError("state table: mismatched sizes");
    for (double w : waits)
      if (!(w >= 0.0) || w > max_wait) throw DomainError("state table: waits must lie in [0, M]");
    return Policy(policy_kind::StateTable{std::move(states), std::move(waits)}, max_wait);
  }

  /// The waiting time after a delivery with transmission time y.
  double wait(double y) const {
    return std::visit(
        [&](const auto& k) -> double {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, policy_kind::ZeroWait>) {
            return 0.0;
          } else if constexpr (std::is_same_v<K, policy_kind::ConstantWait>) {
            return k.wait;
          } else if constexpr (std::is_same_v<K, policy_kind::WaterFilling>) {
            return std::clamp(k.beta - y, 0.0, max_wait_);
          } else if constexpr (std::is_same_v<K, policy_kind::Threshold>) {
            for (const auto& entry : k.context->table)
              if (entry.value == y) return entry.weight;
            return blended_wait(k, y, max_wait_);
          } else if constexpr (std::is_same_v<K, policy_kind::Tabulated>) {
            if (y <= k.ys.front()) return k.zs.front();
            if (y >= k.ys.back()) return k.zs.back();
            const auto it = std::upper_bound(k.ys.begin(), k.ys.end(), y);
            const auto i = static_cast<std::size_t>(std::distance(k.ys.begin(), it)) - 1;
            const double t = (y - k.ys[i]) / (k.ys[i + 1] - k.ys[i]);
            return k.zs[i] + t * (k.zs[i + 1] - k.zs[i]);
          } else {
            for (std::size_t i = 0; i < k.states.size(); ++i)
              if (k.states[i] == y) return k.waits[i];
            throw DomainError("policy is undefined at transmission time " + std::to_string(y));
          }
        },
        kind_);
  }

  double max_wait() const noexcept { return max_wait_; }
  const Kind& kind() const noexcept { return kind_; }

  template <typename K>
  bool is() const noexcept {
    return std::holds_alternative<K>(kind_);
  }

  std::string name() const {
    switch (kind_.index()) {
      case 0: return "zero_wait";
      case 1: return "constant_wait";
      case 2: return "water_filling";
      case 3: return "threshold";
      case 4: return "tabulated";
      default: return "state_table";
    }
  }

private:
  static double blended_wait(const policy_kind::Threshold& k, double y, double max_wait) {
    const auto& c = *k.context;
    const double low = z_nu(y, k.nu, c.model, c.pf, max_wait, c.tolerance);
    if (k.blend == 0.0) return low;
    return (1.0 - k.blend) * low + k.blend * z_nu(y, k.nu_high, c.model, c.pf, max_wait, c.tolerance);
  }

  Policy(Kind kind, double max_wait) : kind_(std::move(kind)), max_wait_(max_wait) {
    if (!(max_wait_ >= 0.0)) throw DomainError("maximum wait must be >= 0");
  }

  Kind kind_;
  double max_wait_;
};

}  // namespace aoi
