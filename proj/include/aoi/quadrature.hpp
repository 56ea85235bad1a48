#pragma once

// Gaussian quadrature rules used to take expectations over continuous
// transmission-time laws. Nodes are found by Newton iteration on the
// three-term recurrences, which keeps the tiny tail weights accurate in a
// relative sense (eigenvalue-based rules lose them to absolute roundoff).

#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace aoi {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

namespace detail {

inline bool newton_converged(double z, double z_prev) {
  return std::abs(z - z_prev) <= 1e-15 * std::max(1.0, std::abs(z));
}

}  // namespace detail

/// Gauss-Hermite rule for the weight e^{-x^2} on (-inf, inf).
/// Weights sum to sqrt(pi); nodes are returned in descending order.
inline QuadratureRule gauss_hermite(std::size_t n) {
  if (n == 0) throw std::invalid_argument("gauss_hermite: n must be positive");
  constexpr double pim4 = 0.7511255444649425;  // pi^{-1/4}
  constexpr int max_iter = 100;
  QuadratureRule rule{std::vector<double>(n), std::vector<double>(n)};
  auto& x = rule.nodes;
  auto& w = rule.weights;
  const auto nd = static_cast<double>(n);
  const std::size_t half = (n + 1) / 2;
  double z = 0.0;
  for (std::size_t i = 0; i < half; ++i) {
    if (i == 0) {
      z = std::sqrt(2.0 * nd + 1.0) - 1.85575 * std::pow(2.0 * nd + 1.0, -0.16667);
    } else if (i == 1) {
      z -= 1.14 * std::pow(nd, 0.426) / z;
    } else if (i == 2) {
      z = 1.86 * z - 0.86 * x[0];
    } else if (i == 3) {
      z = 1.91 * z - 0.91 * x[1];
    } else {
      z = 2.0 * z - x[i - 2];
    }
    double pp = 0.0;
    for (int it = 0; it < max_iter; ++it) {
      double p1 = pim4;
      double p2 = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        const auto jd = static_cast<double>(j);
        p1 = z * std::sqrt(2.0 / (jd + 1.0)) * p2 - std::sqrt(jd / (jd + 1.0)) * p3;
      }
      pp = std::sqrt(2.0 * nd) * p2;
      const double z_prev = z;
      z = z_prev - p1 / pp;
      if (detail::newton_converged(z, z_prev)) break;
    }
    x[i] = z;
    x[n - 1 - i] = -z;
    w[i] = 2.0 / (pp * pp);
    w[n - 1 - i] = w[i];
  }
  if (n % 2 == 1) x[half - 1] = 0.0;
  return rule;
}

/// Gauss-Laguerre rule for the weight e^{-x} on [0, inf). Weights sum to 1.
inline QuadratureRule gauss_laguerre(std::size_t n) {
  if (n == 0) throw std::invalid_argument("gauss_laguerre: n must be positive");
  constexpr int max_iter = 100;
  QuadratureRule rule{std::vector<double>(n), std::vector<double>(n)};
  auto& x = rule.nodes;
  auto& w = rule.weights;
  const auto nd = static_cast<double>(n);
  double z = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (i == 0) {
      z = 3.0 / (1.0 + 2.4 * nd);
    } else if (i == 1) {
      z += 15.0 / (1.0 + 2.5 * nd);
    } else {
      const auto ai = static_cast<double>(i - 1);
      z += ((1.0 + 2.55 * ai) / (1.9 * ai)) * (z - x[i - 2]);
    }
    double pp = 0.0;
    double p2 = 0.0;
    for (int it = 0; it < max_iter; ++it) {
      double p1 = 1.0;
      p2 = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        const auto jd = static_cast<double>(j);
        p1 = ((2.0 * jd + 1.0 - z) * p2 - jd * p3) / (jd + 1.0);
      }
      pp = (nd * p1 - nd * p2) / z;
      const double z_prev = z;
      z = z_prev - p1 / pp;
      if (detail::newton_converged(z, z_prev)) break;
    }
    x[i] = z;
    w[i] = -1.0 / (pp * nd * p2);
  }
  return rule;
}

}  // namespace aoi
