#pragma once

// Sample paths of the age process. Update i is delivered at D_i with age
// Y_i, the source waits Z_i = z(Y_i), and update i+1 is delivered at
// D_{i+1} = D_i + Z_i + Y_{i+1}. The area under g(age) between the two
// deliveries is Q_i = q(Y_i, Z_i, Y_{i+1}).

#include <cmath>
#include <cstdint>
#include <future>
#include <vector>

#include "aoi/errors.hpp"
#include "aoi/penalty.hpp"
#include "aoi/policy.hpp"
#include "aoi/ttime.hpp"

namespace aoi {

struct SamplePath {
  std::vector<double> transmission;  // Y_0 .. Y_n
  std::vector<double> waits;         // Z_0 .. Z_{n-1}
  std::vector<double> penalties;     // Q_0 .. Q_{n-1}
  std::vector<double> deliveries;    // D_0 = 0 .. D_n
  double total_penalty = 0.0;
  double total_time = 0.0;  // sum of Y_i + Z_i over the n stages

  std::size_t stages() const noexcept { return waits.size(); }

  /// Submission time of update i+1: D_i + Z_i.
  double submission_time(std::size_t i) const { return deliveries[i] + waits[i]; }

  double ratio() const {
    if (!(total_time > 0.0)) throw DegenerateModelError("sample path has zero total time");
    return total_penalty / total_time;
  }
};

struct SimEstimate {
  double mean_ratio = 0.0;
  double stderr_ratio = 0.0;
  std::size_t replications = 0;
  std::size_t n_stages = 0;
  double empirical_frequency = 0.0;  // stages per unit time, averaged over replications
};

struct TrajectoryPoint {
  double t;
  double age;
  double penalty;
};

/// Runs the policy over an explicit transmission sequence Y_0 .. Y_n (n stages).
inline SamplePath simulate_sequence(const Policy& policy, const PenaltyFunction& pf, std::vector<double> transmission) {
  if (transmission.size() < 2) throw DomainError("simulate: need at least one stage");
  SamplePath path;
  const std::size_t n = transmission.size() - 1;
  path.transmission = std::move(transmission);
  path.waits.resize(n);
  path.penalties.resize(n);
  path.deliveries.resize(n + 1);
  path.deliveries[0] = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double y = path.transmission[i];
    const double y_next = path.transmission[i + 1];
    const double z = policy.wait(y);
    path.waits[i] = z;
    path.penalties[i] = stage_penalty_q(pf, y, z, y_next);
    path.deliveries[i + 1] = path.deliveries[i] + z + y_next;
    path.total_penalty += path.penalties[i];
    path.total_time += y + z;
  }
  return path;
}

inline SamplePath simulate(const Policy& policy, const TransmissionModel& model, const PenaltyFunction& pf,
                           std::size_t n_stages, std::uint64_t seed) {
  if (n_stages == 0) throw DomainError("simulate: n_stages must be >= 1");
  return simulate_sequence(policy, pf, model.sample_path(n_stages + 1, seed));
}

/// Seed of replication `index` derived from a base seed (SplitMix64 finalizer).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Mean of per-path ratios over independent replications, with the standard
/// error taken across replications.
inline SimEstimate estimate(const Policy& policy, const TransmissionModel& model, const PenaltyFunction& pf,
                            std::size_t n_stages, std::size_t replications, std::uint64_t seed) {
  if (replications < 2) throw DomainError("estimate: need at least two replications");
  struct Rep {
    double ratio;
    double frequency;
  };
  std::vector<std::future<Rep>> jobs;
  jobs.reserve(replications);
  for (std::size_t r = 0; r < replications; ++r) {
    jobs.push_back(std::async(std::launch::async, [&, r] {
      const SamplePath path = simulate(policy, model, pf, n_stages, derive_seed(seed, r));
      return Rep{path.ratio(), static_cast<double>(n_stages) / path.total_time};
    }));
  }
  std::vector<Rep> reps;
  reps.reserve(replications);
  for (auto& job : jobs) reps.push_back(job.get());

  SimEstimate out;
  out.replications = replications;
  out.n_stages = n_stages;
  for (const auto& r : reps) {
    out.mean_ratio += r.ratio;
    out.empirical_frequency += r.frequency;
  }
  const auto count = static_cast<double>(replications);
  out.mean_ratio /= count;
  out.empirical_frequency /= count;
  double ss = 0.0;
  for (const auto& r : reps) ss += (r.ratio - out.mean_ratio) * (r.ratio - out.mean_ratio);
  out.stderr_ratio = std::sqrt(ss / (count - 1.0)) / std::sqrt(count);
  return out;
}

/// Age trajectory on [0, D_n]: samples at multiples of `time_step` plus both
/// sides of every delivery instant (the left limit Y_i + Z_i + Y_{i+1}, then
/// the reset to Y_{i+1}).
inline std::vector<TrajectoryPoint> age_trajectory(const SamplePath& path, const PenaltyFunction& pf,
                                                   double time_step) {
  if (!(time_step > 0.0)) throw DomainError("age_trajectory: time_step must be > 0");
  if (path.stages() == 0) throw DomainError("age_trajectory: empty path");
  std::vector<TrajectoryPoint> out;
  auto emit = [&](double t, double age) { out.push_back({t, age, pf(age)}); };
  for (std::size_t i = 0; i < path.stages(); ++i) {
    const double start = path.deliveries[i];
    const double end = path.deliveries[i + 1];
    const double base = path.transmission[i];
    emit(start, base);
    for (auto k = static_cast<std::int64_t>(std::floor(start / time_step)) + 1;; ++k) {
      const double t = static_cast<double>(k) * time_step;
      if (!(t < end)) break;
      if (t > start) emit(t, base + (t - start));
    }
    emit(end, base + path.waits[i] + path.transmission[i + 1]);
  }
  emit(path.deliveries.back(), path.transmission.back());
  return out;
}

}  // namespace aoi
