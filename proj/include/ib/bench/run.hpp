#pragma once

#include <algorithm>
#include <cassert>
#include <chrono>
#include <cstring>
#include <optional>
#include <string>
#include <vector>

#include "ib/bench/config.hpp"
#include "ib/bench/setup.hpp"
#include "ib/interpolate.hpp"
#include "ib/spread.hpp"

namespace ib::bench {

struct OperationTiming {
  std::string operation;
  std::vector<double> seconds;  // retained per call so percentiles stay recomputable

  std::size_t calls() const { return seconds.size(); }
  double mean() const {
    double total = 0.0;
    for (double s : seconds) total += s;
    return seconds.empty() ? 0.0 : total / static_cast<double>(seconds.size());
  }
  double min() const {
    return seconds.empty() ? 0.0 : *std::min_element(seconds.begin(), seconds.end());
  }
  double max() const {
    return seconds.empty() ? 0.0 : *std::max_element(seconds.begin(), seconds.end());
  }
};

struct TimingReport {
  BenchmarkConfig config;
  OperationTiming interpolate_timing;
  OperationTiming spread_timing;
  PointSet<3> final_positions;
  std::uint64_t physics_fingerprint = 0;
};

inline std::uint64_t fnv1a(const void* data, std::size_t bytes,
                           std::uint64_t hash = 14695981039346656037ull) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < bytes; ++i) {
    hash ^= p[i];
    hash *= 1099511628211ull;
  }
  return hash;
}

/// One step of the tethered-points cycle, per step: interpolate the fixed
/// velocity field to the points, predict positions, evaluate tether forces
/// there, spread them (the result is kept but does not feed back),
/// interpolate a second time as a full solver would, and update positions.
/// Interpolation is timed twice per step and spreading once.
inline TimingReport run_benchmark(const BenchmarkConfig& cfg) {
  validate(cfg);
  using clock = std::chrono::steady_clock;
  const double edge = cfg.domain_edge_cm();
  const double dt = cfg.dt_s();
  const CosineKernel kernel;

  const auto grids = mac_grids(cfg.refinement, edge);
  const auto velocity = shear_field(grids, cfg.shear_rate, edge);
  PointSet<3> positions = scatter_points(cfg.point_count, edge, cfg.seed);
  const PointSet<3> anchors = positions;
  PointSet<3> predicted(positions.size());

  std::optional<SpreadWorkspace<3>> workspace;
  if (cfg.algorithm == SpreadAlgorithm::fused)
    workspace.emplace(positions.size(), grids[0]);
  else if (cfg.algorithm == SpreadAlgorithm::buffered)
    workspace.emplace(positions.size(), grids[0], cfg.sweep_width);

  TimingReport report;
  report.config = cfg;
  report.interpolate_timing.operation = "interpolate";
  report.spread_timing.operation = "spread";
  report.interpolate_timing.seconds.reserve(2 * static_cast<std::size_t>(cfg.steps));
  report.spread_timing.seconds.reserve(static_cast<std::size_t>(cfg.steps));

  auto timed_interpolate = [&]() {
    const auto t0 = clock::now();
    auto result = interpolate_vector<3>(velocity, positions, kernel, cfg.workers);
    report.interpolate_timing.seconds.push_back(
        std::chrono::duration<double>(clock::now() - t0).count());
    return result;
  };

  std::optional<std::array<GridField<3>, 3>> spread_result;
  for (int step = 0; step < cfg.steps; ++step) {
    const auto u_star = timed_interpolate();
    for (std::size_t j = 0; j < positions.size(); ++j)
      for (std::size_t a = 0; a < 3; ++a)
        predicted[j][a] = positions[j][a] + dt * u_star[a][j];

    const auto force = hookean_force(predicted, anchors, cfg.spring_constant, edge);

    const auto t0 = clock::now();
    spread_result = spread_vector<3>(predicted, force, grids, kernel, cfg.algorithm,
                                     cfg.sweep_width,
                                     workspace ? &*workspace : nullptr, cfg.workers);
    report.spread_timing.seconds.push_back(
        std::chrono::duration<double>(clock::now() - t0).count());

    const auto u_next = timed_interpolate();
    // The velocity field is fixed, so the second interpolation reproduces
    // the first within the same step.
    assert(u_next == u_star);
    for (std::size_t j = 0; j < positions.size(); ++j)
      for (std::size_t a = 0; a < 3; ++a) positions[j][a] += dt * u_next[a][j];
  }

  assert(report.interpolate_timing.calls() == 2 * static_cast<std::size_t>(cfg.steps));
  assert(report.spread_timing.calls() == static_cast<std::size_t>(cfg.steps));

  report.final_positions = positions;
  std::uint64_t hash = fnv1a(positions.data(), positions.size() * sizeof(Vec<3>));
  if (spread_result)
    for (const auto& component : *spread_result)
      hash = fnv1a(component.values.data(), component.values.size() * sizeof(double),
                   hash);
  report.physics_fingerprint = hash;
  return report;
}

}  // namespace ib::bench
