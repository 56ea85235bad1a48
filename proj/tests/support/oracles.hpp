#pragma once

// Reference computations used to check the library. None of these call the
// solver or the library's quadrature: integrals come from Boost's adaptive
// Gauss-Kronrod, policy values from hand-written sums and brute-force grids.

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <utility>
#include <vector>

#include "aoi/penalty.hpp"

namespace oracle {

/// Integral of g over [a, b] by adaptive Gauss-Kronrod, split at the points
/// where g is not smooth (integer multiples of 1/alpha for stair steps, knots
/// for custom tables).
inline double integrate_g(const aoi::PenaltyFunction& pf, double a, double b) {
  if (!(b > a)) return 0.0;
  std::vector<double> cuts{a};
  if (const auto* s = std::get_if<aoi::penalty_kind::StairStep>(&pf.kind()); s && s->alpha > 0.0) {
    for (double k = std::floor(a * s->alpha) + 1.0; k / s->alpha < b; k += 1.0) cuts.push_back(k / s->alpha);
  }
  if (const auto* c = std::get_if<aoi::penalty_kind::Custom>(&pf.kind())) {
    for (double x : c->ages)
      if (x > a && x < b) cuts.push_back(x);
  }
  cuts.push_back(b);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double lo = cuts[i];
    const double hi = cuts[i + 1];
    // Stair steps jump exactly at `lo`; evaluate the open interval from the inside.
    auto g = [&](double x) { return pf(std::clamp(x, std::nextafter(lo, hi), std::nextafter(hi, lo))); };
    total += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(g, lo, hi, 10, 1e-12);
  }
  return total;
}

/// Stage penalty as the raw integral of g over [y, y + z + y'].
inline double q(const aoi::PenaltyFunction& pf, double y, double z, double y_next) {
  return integrate_g(pf, y, y + z + y_next);
}

struct Discrete {
  std::vector<double> values;
  std::vector<double> probs;
};

/// Average age of a per-state waiting rule on an i.i.d. discrete law:
/// E[(Y + Z + Y')^2 - Y^2] / (2 E[Y + Z]) with Y' an independent copy.
inline double iid_linear_objective(const Discrete& law, const std::vector<double>& waits) {
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < law.values.size(); ++i) {
    const double y = law.values[i];
    const double period = y + waits[i];
    den += law.probs[i] * period;
    for (std::size_t j = 0; j < law.values.size(); ++j) {
      const double top = period + law.values[j];
      num += law.probs[i] * law.probs[j] * 0.5 * (top * top - y * y);
    }
  }
  return num / den;
}

/// Same quantity for a Markov chain with transition matrix `P` and stationary law `pi`.
inline double markov_objective(const aoi::PenaltyFunction& pf, const std::vector<double>& values,
                               const std::vector<std::vector<double>>& P, const std::vector<double>& pi,
                               const std::vector<double>& waits) {
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    den += pi[i] * (values[i] + waits[i]);
    for (std::size_t j = 0; j < values.size(); ++j) num += pi[i] * P[i][j] * q(pf, values[i], waits[i], values[j]);
  }
  return num / den;
}

/// Best objective over (z(0), z(2)) on [0, M]^2 for the uniform {0, 2} law at
/// the given grid step. Rows reuse partial sums, so the inner loop is a few flops.
inline std::pair<double, std::pair<double, double>> grid_two_point(double step, double max_wait) {
  const auto n = static_cast<long>(std::llround(max_wait / step));
  double best = std::numeric_limits<double>::infinity();
  std::pair<double, double> arg{0.0, 0.0};
  for (long a = 0; a <= n; ++a) {
    const double z0 = static_cast<double>(a) * step;
    for (long b = 0; b <= n; ++b) {
      const double z2 = static_cast<double>(b) * step;
      // Enumerate (Y, Y') over {0, 2}^2 with probability 1/4 each.
      const double p0 = z0;
      const double p2 = 2.0 + z2;
      const double num = 0.25 * 0.5 * (p0 * p0 + (p0 + 2) * (p0 + 2) + (p2 * p2 - 4) + ((p2 + 2) * (p2 + 2) - 4));
      const double den = 0.5 * (p0 + p2);
      const double v = num / den;
      if (v < best) {
        best = v;
        arg = {z0, z2};
      }
    }
  }
  return {best, arg};
}

/// Water-filling objective for Exp(1) transmission times, from
/// E[max(beta, Y)] = beta + e^-beta and E[max(beta, Y)^2] = beta^2 + e^-beta (2 beta + 2).
inline double exponential_water_filling(double beta) {
  const double e = std::exp(-beta);
  const double m1 = beta + e;
  const double m2 = beta * beta + e * (2.0 * beta + 2.0);
  return m2 / (2.0 * m1) + 1.0;
}

/// Minimum over beta of the exponential water-filling objective (golden section).
inline std::pair<double, double> exponential_water_filling_optimum() {
  double lo = 0.0;
  double hi = 5.0;
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int i = 0; i < 200; ++i) {
    const double a = hi - r * (hi - lo);
    const double b = lo + r * (hi - lo);
    if (exponential_water_filling(a) < exponential_water_filling(b)) hi = b;
    else lo = a;
  }
  const double beta = 0.5 * (lo + hi);
  return {beta, exponential_water_filling(beta)};
}

/// Whether some water level beta in [0, E[Y] + M] (step `step`) beats zero-wait
/// by more than `margin` on a discrete i.i.d. law with linear penalty.
inline bool grid_improves_on_zero_wait(const Discrete& law, double max_wait, double margin, double step = 1e-3) {
  std::vector<double> zero(law.values.size(), 0.0);
  const double base = iid_linear_objective(law, zero);
  double mean = 0.0;
  for (std::size_t i = 0; i < law.values.size(); ++i) mean += law.probs[i] * law.values[i];
  std::vector<double> waits(law.values.size());
  for (double beta = 0.0; beta <= mean + max_wait; beta += step) {
    for (std::size_t i = 0; i < law.values.size(); ++i) waits[i] = std::clamp(beta - law.values[i], 0.0, max_wait);
    if (iid_linear_objective(law, waits) < base - margin) return true;
  }
  return false;
}

/// Random discrete law on distinct values in [0, top] with 2..max_states atoms.
inline Discrete random_discrete(std::mt19937_64& rng, std::size_t max_states = 5, double top = 4.0) {
  std::uniform_int_distribution<std::size_t> count(2, max_states);
  std::uniform_real_distribution<double> value(0.0, top);
  std::uniform_real_distribution<double> weight(0.05, 1.0);
  Discrete law;
  const std::size_t n = count(rng);
  while (law.values.size() < n) {
    const double v = std::round(value(rng) * 1000.0) / 1000.0;
    if (std::find(law.values.begin(), law.values.end(), v) == law.values.end()) law.values.push_back(v);
  }
  std::sort(law.values.begin(), law.values.end());
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    law.probs.push_back(weight(rng));
    total += law.probs.back();
  }
  for (double& p : law.probs) p /= total;
  if (law.values.back() <= 0.0) law.values.back() = 1.0;
  return law;
}

/// Random row-stochastic matrix with every entry positive (hence irreducible).
inline std::vector<std::vector<double>> random_transition(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> weight(0.05, 1.0);
  std::vector<std::vector<double>> P(n, std::vector<double>(n));
  for (auto& row : P) {
    double total = 0.0;
    for (double& x : row) total += (x = weight(rng));
    for (double& x : row) x /= total;
    // Rows must sum to one within 1e-12; absorb the rounding in the last entry.
    double s = 0.0;
    for (std::size_t j = 0; j + 1 < n; ++j) s += row[j];
    row[n - 1] = 1.0 - s;
  }
  return P;
}

/// Stationary law by power iteration (independent of the library's linear solve).
inline std::vector<double> power_iteration(const std::vector<std::vector<double>>& P) {
  const std::size_t n = P.size();
  std::vector<double> pi(n, 1.0 / static_cast<double>(n));
  for (int it = 0; it < 100000; ++it) {
    std::vector<double> next(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) next[j] += pi[i] * P[i][j];
    double diff = 0.0;
    for (std::size_t j = 0; j < n; ++j) diff = std::max(diff, std::abs(next[j] - pi[j]));
    pi = std::move(next);
    if (diff < 1e-16) break;
  }
  return pi;
}

}  // namespace oracle
