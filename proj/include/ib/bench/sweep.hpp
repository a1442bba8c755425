#pragma once

#include <functional>
#include <span>
#include <vector>

#include "ib/bench/run.hpp"

namespace ib::bench {

enum class SweepMode { strong, weak, grid };

inline constexpr std::array<int, 4> default_refinements = {16, 32, 64, 128};
inline constexpr std::array<SpreadAlgorithm, 4> all_algorithms = {
    SpreadAlgorithm::serial, SpreadAlgorithm::fused, SpreadAlgorithm::buffered,
    SpreadAlgorithm::otf};

using ProgressFn = std::function<void(const BenchmarkConfig&)>;

namespace detail {
inline void notify(const ProgressFn& progress, const BenchmarkConfig& cfg) {
  if (progress) progress(cfg);
}
}  // namespace detail

/// Strong scaling: the fixed problem of `base` at worker counts 1, 2, 4, ...
/// capped by base.workers (which is included even when not a power of two).
/// Runs execute sequentially so timings do not interfere.
inline std::vector<TimingReport> sweep_strong(const BenchmarkConfig& base,
                                              const ProgressFn& progress = {}) {
  validate(base);
  std::vector<TimingReport> reports;
  for (int p = 1; p <= base.workers; p *= 2) {
    BenchmarkConfig cfg = base;
    cfg.workers = p;
    detail::notify(progress, cfg);
    reports.push_back(run_benchmark(cfg));
    if (p == base.workers) return reports;
    if (2 * p > base.workers) {
      cfg.workers = base.workers;
      detail::notify(progress, cfg);
      reports.push_back(run_benchmark(cfg));
      return reports;
    }
  }
  return reports;
}

/// Weak scaling: point count and worker count double together from the base
/// configuration, one run per level.
inline std::vector<TimingReport> sweep_weak(const BenchmarkConfig& base, int levels = 4,
                                            const ProgressFn& progress = {}) {
  validate(base);
  std::vector<TimingReport> reports;
  for (int level = 0; level < levels; ++level) {
    BenchmarkConfig cfg = base;
    cfg.point_count = base.point_count << level;
    cfg.workers = base.workers << level;
    detail::notify(progress, cfg);
    reports.push_back(run_benchmark(cfg));
  }
  return reports;
}

/// Grid dependence: fixed points and workers across grid refinements, one
/// run per (refinement, algorithm) pair.
inline std::vector<TimingReport> sweep_grid(
    const BenchmarkConfig& base, std::span<const int> refinements,
    std::span<const SpreadAlgorithm> algorithms, const ProgressFn& progress = {}) {
  validate(base);
  std::vector<TimingReport> reports;
  for (int refinement : refinements) {
    for (SpreadAlgorithm algorithm : algorithms) {
      BenchmarkConfig cfg = base;
      cfg.refinement = refinement;
      cfg.algorithm = algorithm;
      detail::notify(progress, cfg);
      reports.push_back(run_benchmark(cfg));
    }
  }
  return reports;
}

inline std::vector<TimingReport> scaling_sweep(const BenchmarkConfig& base,
                                               SweepMode mode,
                                               const ProgressFn& progress = {}) {
  switch (mode) {
    case SweepMode::strong:
      return sweep_strong(base, progress);
    case SweepMode::weak:
      return sweep_weak(base, 4, progress);
    case SweepMode::grid:
      return sweep_grid(base, default_refinements, all_algorithms, progress);
  }
  throw ConfigError("unknown sweep mode");
}

}  // namespace ib::bench
