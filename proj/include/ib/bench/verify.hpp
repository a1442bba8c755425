#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "ib/bench/run.hpp"
#include "ib/interpolate.hpp"
#include "ib/reduce.hpp"
#include "ib/sort.hpp"
#include "ib/spread.hpp"
#include "ib/stats.hpp"

namespace ib::bench {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

namespace verify_detail {

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3e", v);
  return buf;
}

inline double max_rel_deviation(std::span<const double> got,
                                std::span<const double> want) {
  double scale = 0.0;
  for (double v : want) scale = std::max(scale, std::abs(v));
  if (scale == 0.0) scale = 1.0;
  double dev = 0.0;
  for (std::size_t i = 0; i < got.size(); ++i)
    dev = std::max(dev, std::abs(got[i] - want[i]));
  return dev / scale;
}

template <std::size_t D>
PointSet<D> random_points(const StaggeredGrid<D>& g, std::size_t n,
                          std::mt19937_64& rng) {
  PointSet<D> points(n);
  for (auto& p : points) {
    for (std::size_t a = 0; a < D; ++a) {
      if (g.is_periodic(a)) {
        // Points may straddle or lie outside the box; they wrap.
        std::uniform_real_distribution<double> c(-g.axis_length(a),
                                                 2.0 * g.axis_length(a));
        p[a] = g.origin()[a] + c(rng);
      } else {
        std::uniform_real_distribution<double> c(0.0, g.axis_length(a));
        p[a] = g.origin()[a] + c(rng);
      }
    }
  }
  return points;
}

inline LagrangianValues random_values(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> v(-1.0, 1.0);
  LagrangianValues out(n);
  for (auto& x : out) x = v(rng);
  return out;
}

template <std::size_t D>
StaggeredGrid<D> random_grid(std::mt19937_64& rng, int min_extent, int max_extent,
                             bool force_periodic = false) {
  std::uniform_int_distribution<int> extent_dist(min_extent, max_extent);
  std::uniform_real_distribution<double> alpha_dist(0.0, 0.999);
  std::uniform_int_distribution<int> coin(0, 1);
  std::array<int, D> extents;
  Vec<D> alpha;
  std::array<bool, D> periodic;
  for (std::size_t a = 0; a < D; ++a) {
    extents[a] = extent_dist(rng);
    alpha[a] = alpha_dist(rng);
    periodic[a] = force_periodic || coin(rng) == 1;
  }
  return StaggeredGrid<D>(extents, 0.5, alpha, periodic);
}

// One randomized configuration: every parallel spreading variant against the
// serial baseline, and parallel interpolation against its one-worker run.
// Returns the largest relative deviation seen.
template <std::size_t D>
double coupling_case(std::mt19937_64& rng, std::size_t max_points, int sweep_width) {
  std::uniform_int_distribution<std::size_t> n_dist(0, max_points);
  std::uniform_int_distribution<int> worker_dist(2, 8);
  const StaggeredGrid<D> g = random_grid<D>(rng, 8, 64);
  const CosineKernel kernel;
  const PointSet<D> points = random_points(g, n_dist(rng), rng);
  const LagrangianValues values = random_values(points.size(), rng);
  const int workers = worker_dist(rng);

  const GridField<D> oracle = spread_serial(points, values, g, kernel);
  double worst = 0.0;

  SpreadWorkspace<D> ws(points.size(), g);
  const GridField<D> fused = spread_fused(points, values, g, kernel, ws, workers);
  worst = std::max(worst, max_rel_deviation(fused.values, oracle.values));

  SpreadWorkspace<D> wsb(points.size(), g, sweep_width);
  const GridField<D> buffered =
      spread_buffered(points, values, g, kernel, wsb, workers);
  worst = std::max(worst, max_rel_deviation(buffered.values, oracle.values));

  const GridField<D> otf =
      spread_buffered_otf(points, values, g, kernel, sweep_width, workers);
  worst = std::max(worst, max_rel_deviation(otf.values, oracle.values));

  GridField<D> field(g);
  std::uniform_real_distribution<double> v(-1.0, 1.0);
  for (auto& x : field.values) x = v(rng);
  const LagrangianValues serial_interp = interpolate(field, points, kernel, 1);
  const LagrangianValues parallel_interp = interpolate(field, points, kernel, workers);
  worst = std::max(worst, max_rel_deviation(parallel_interp, serial_interp));
  return worst;
}

}  // namespace verify_detail

/// Randomized oracle equivalence: spread_fused, spread_buffered, and
/// spread_buffered_otf against spread_serial, and parallel interpolation
/// against its one-worker run, over mixed dimensions, refinements 8-64,
/// mixed periodicity, and sweep widths {1, 4, 8, 64}.
inline CheckResult check_coupling_oracles(std::uint64_t seed, int cases,
                                          std::size_t max_points) {
  std::mt19937_64 rng(seed);
  constexpr std::array<int, 4> widths = {1, 4, 8, 64};
  double worst = 0.0;
  for (int i = 0; i < cases; ++i) {
    const int b = widths[static_cast<std::size_t>(i) % widths.size()];
    switch (i % 3) {
      case 0: worst = std::max(worst, verify_detail::coupling_case<1>(rng, max_points, b)); break;
      case 1: worst = std::max(worst, verify_detail::coupling_case<2>(rng, max_points, b)); break;
      default: worst = std::max(worst, verify_detail::coupling_case<3>(rng, max_points, b)); break;
    }
  }
  return {"oracle-equivalence", worst <= 1e-12,
          "max relative deviation " + verify_detail::fmt(worst) + " over " +
              std::to_string(cases) + " configurations (tolerance 1e-12)"};
}

/// h^d <spread(G), e> == <G, interpolate(e)> on random instances: spreading
/// and interpolation are transposes of one another.
inline CheckResult check_adjointness(std::uint64_t seed, int instances) {
  std::mt19937_64 rng(seed ^ 0x5bd1e995u);
  double worst = 0.0;
  for (int i = 0; i < instances; ++i) {
    const StaggeredGrid<3> g = verify_detail::random_grid<3>(rng, 6, 16);
    const CosineKernel kernel;
    std::uniform_int_distribution<std::size_t> n_dist(1, 256);
    const PointSet<3> points = verify_detail::random_points(g, n_dist(rng), rng);
    const LagrangianValues weights = verify_detail::random_values(points.size(), rng);
    GridField<3> e(g);
    std::uniform_real_distribution<double> v(-1.0, 1.0);
    for (auto& x : e.values) x = v(rng);

    const double hd = std::pow(g.spacing(), 3.0);
    const GridField<3> spread = spread_serial(points, weights, g, kernel);
    double grid_side = 0.0;
    for (std::size_t k = 0; k < e.values.size(); ++k)
      grid_side += spread.values[k] * e.values[k];
    grid_side *= hd;

    const LagrangianValues interp = interpolate(e, points, kernel, 2);
    double point_side = 0.0;
    double scale = 0.0;
    for (std::size_t j = 0; j < points.size(); ++j) {
      point_side += weights[j] * interp[j];
      scale += std::abs(weights[j] * interp[j]);
    }
    worst = std::max(worst,
                     std::abs(grid_side - point_side) / std::max(scale, 1e-30));
  }
  return {"adjointness", worst <= 1e-12,
          "max relative mismatch " + verify_detail::fmt(worst) + " over " +
              std::to_string(instances) + " instances (tolerance 1e-12)"};
}

/// On fully periodic domains spreading conserves the total value and
/// interpolating a constant field returns the constant.
inline CheckResult check_conservation(std::uint64_t seed, int instances) {
  std::mt19937_64 rng(seed ^ 0x9e3779b9u);
  const CosineKernel kernel;
  double worst = 0.0;
  for (int i = 0; i < instances; ++i) {
    const StaggeredGrid<3> g =
        verify_detail::random_grid<3>(rng, 6, 16, /*force_periodic=*/true);
    std::uniform_int_distribution<std::size_t> n_dist(1, 512);
    const PointSet<3> points = verify_detail::random_points(g, n_dist(rng), rng);
    const LagrangianValues values = verify_detail::random_values(points.size(), rng);
    const double hd = std::pow(g.spacing(), 3.0);

    GridField<3> field(g);
    SpreadWorkspace<3> ws(points.size(), g, 8);
    switch (i % 3) {
      case 0: field = spread_serial(points, values, g, kernel); break;
      case 1: field = spread_fused(points, values, g, kernel, ws, 4); break;
      default: field = spread_buffered(points, values, g, kernel, ws, 4); break;
    }
    double total_out = 0.0;
    for (double v : field.values) total_out += v;
    double total_in = 0.0, scale = 0.0;
    for (double v : values) {
      total_in += v;
      scale += std::abs(v);
    }
    worst = std::max(worst, std::abs(total_out * hd - total_in) / std::max(scale, 1.0));

    GridField<3> constant(g);
    std::fill(constant.values.begin(), constant.values.end(), 3.25);
    const LagrangianValues interp = interpolate(constant, points, kernel, 2);
    for (double v : interp)
      worst = std::max(worst, std::abs(v - 3.25) / 3.25);
  }
  return {"conservation-and-partition-of-unity", worst <= 1e-13,
          "max relative error " + verify_detail::fmt(worst) + " over " +
              std::to_string(instances) + " instances (tolerance 1e-13)"};
}

/// The five-point key walkthrough: keys [1,6,5,3,5] sort to the permutation
/// [1,4,3,5,2] and the reduce merges exactly the slot shared by points 3 and
/// 5. Exact integer checks.
inline CheckResult check_schematic_walkthrough() {
  std::vector<SortKey> keys = {1, 6, 5, 3, 5};
  std::vector<std::uint32_t> perm = {1, 2, 3, 4, 5};
  key_value_sort<std::uint32_t>(keys, perm, 3);
  bool pass = keys == std::vector<SortKey>{1, 3, 5, 5, 6} &&
              perm == std::vector<std::uint32_t>{1, 4, 3, 5, 2};

  // Values v_i = 2^i make every partial sum distinguishable exactly.
  const std::vector<double> point_values = {2.0, 4.0, 8.0, 16.0, 32.0};
  std::vector<double> gathered(5);
  for (std::size_t i = 0; i < 5; ++i) gathered[i] = point_values[perm[i] - 1];
  std::vector<SortKey> run_keys(5);
  std::vector<double> run_sums(5);
  const std::size_t q = segmented_reduce(keys, gathered, run_keys, run_sums, 3);
  pass = pass && q == 4 &&
         std::vector<SortKey>(run_keys.begin(), run_keys.begin() + 4) ==
             std::vector<SortKey>{1, 3, 5, 6} &&
         run_sums[0] == 2.0 && run_sums[1] == 16.0 && run_sums[2] == 8.0 + 32.0 &&
         run_sums[3] == 4.0;
  return {"schematic-walkthrough", pass,
          pass ? "sort and reduce reproduce the five-point walkthrough exactly"
               : "sort/reduce output differs from the walkthrough"};
}

/// Randomized sort and reduce cases against serial oracles: a stable sort
/// must match bitwise, segmented sums to 1e-12.
inline CheckResult check_primitive_oracles(std::uint64_t seed, int cases) {
  std::mt19937_64 rng(seed ^ 0xc2b2ae35u);
  std::uniform_int_distribution<std::size_t> size_dist(0, 1000);
  std::uniform_real_distribution<double> value_dist(-1.0, 1.0);
  int sort_mismatches = 0;
  double worst_reduce = 0.0;
  for (int trial = 0; trial < cases; ++trial) {
    const std::size_t n = size_dist(rng);
    std::uniform_int_distribution<SortKey> key_dist(0, trial % 2 ? 50u : 0xFFFFFFFEu);
    std::vector<SortKey> keys(n);
    std::vector<std::uint32_t> payload(n);
    for (std::size_t i = 0; i < n; ++i) {
      keys[i] = key_dist(rng);
      payload[i] = static_cast<std::uint32_t>(i);
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return keys[a] < keys[b]; });
    std::vector<SortKey> want_keys(n);
    std::vector<std::uint32_t> want_payload(n);
    for (std::size_t i = 0; i < n; ++i) {
      want_keys[i] = keys[order[i]];
      want_payload[i] = payload[order[i]];
    }

    ib::key_value_sort<std::uint32_t>(keys, payload, 1 + trial % 8);
    if (keys != want_keys || payload != want_payload) ++sort_mismatches;

    std::vector<double> values(n);
    for (auto& v : values) v = value_dist(rng);
    std::vector<SortKey> run_keys_want;
    std::vector<double> run_sums_want;
    for (std::size_t i = 0; i < n; ++i) {
      if (i == 0 || keys[i] != keys[i - 1]) {
        run_keys_want.push_back(keys[i]);
        run_sums_want.push_back(values[i]);
      } else {
        run_sums_want.back() += values[i];
      }
    }
    std::vector<SortKey> run_keys(n);
    std::vector<double> run_sums(n);
    const std::size_t q =
        segmented_reduce(keys, values, run_keys, run_sums, 1 + trial % 8);
    if (q != run_keys_want.size()) {
      ++sort_mismatches;
      continue;
    }
    for (std::size_t i = 0; i < q; ++i) {
      if (run_keys[i] != run_keys_want[i]) ++sort_mismatches;
      worst_reduce =
          std::max(worst_reduce, std::abs(run_sums[i] - run_sums_want[i]) /
                                     std::max(1.0, std::abs(run_sums_want[i])));
    }
  }
  const bool pass = sort_mismatches == 0 && worst_reduce <= 1e-12;
  return {"primitive-oracles", pass,
          std::to_string(cases) + " cases, " + std::to_string(sort_mismatches) +
              " sort mismatches, max reduce deviation " +
              verify_detail::fmt(worst_reduce) + " (tolerance 1e-12)"};
}

/// Identical configuration, seed, and worker count give bitwise-identical
/// final positions and physics fingerprints.
inline CheckResult check_determinism(std::uint64_t seed, int workers) {
  BenchmarkConfig cfg;
  cfg.point_count = 1 << 10;
  cfg.refinement = 16;
  cfg.steps = 3;
  cfg.workers = workers;
  cfg.seed = seed;
  const TimingReport a = run_benchmark(cfg);
  const TimingReport b = run_benchmark(cfg);
  const bool pass = a.physics_fingerprint == b.physics_fingerprint &&
                    a.final_positions == b.final_positions;
  char buf[64];
  std::snprintf(buf, sizeof(buf), "fingerprints 0x%016llx / 0x%016llx",
                static_cast<unsigned long long>(a.physics_fingerprint),
                static_cast<unsigned long long>(b.physics_fingerprint));
  return {"determinism", pass, buf};
}

/// Kernel-evaluation counters for interpolation and fused spreading equal
/// n_points * s^d exactly at every refinement: the work done is independent
/// of the grid size.
inline CheckResult check_operation_counts(std::uint64_t seed,
                                          std::span<const int> refinements) {
  std::mt19937_64 rng(seed ^ 0x85ebca6bu);
  const CosineKernel kernel;
  const std::size_t n = 512;
  bool pass = true;
  std::string detail;
  for (int refinement : refinements) {
    const StaggeredGrid<3> g({refinement, refinement, refinement},
                             1.0 / refinement, {0.5, 0.5, 0.5}, {true, true, true});
    const PointSet<3> points = verify_detail::random_points(g, n, rng);
    const LagrangianValues values = verify_detail::random_values(n, rng);
    const std::uint64_t expected =
        static_cast<std::uint64_t>(n) *
        static_cast<std::uint64_t>(shift_count<3>(kernel.support()));

    stats::reset_delta_evaluations();
    GridField<3> field(g);
    interpolate(field, points, kernel, 3);
    const std::uint64_t interp_count = stats::delta_evaluations();

    stats::reset_delta_evaluations();
    SpreadWorkspace<3> ws(n, g);
    spread_fused(points, values, g, kernel, ws, 3);
    const std::uint64_t spread_count = stats::delta_evaluations();

    if (interp_count != expected || spread_count != expected) pass = false;
    detail += std::to_string(refinement) + ":" + std::to_string(interp_count) + "/" +
              std::to_string(spread_count) + " ";
  }
  return {"operation-counts", pass,
          "per-refinement interpolate/spread evaluation counts " + detail +
              "(expected " +
              std::to_string(n * static_cast<std::uint64_t>(
                                     shift_count<3>(kernel.support()))) +
              " each)"};
}

struct VerifyOptions {
  std::uint64_t seed = 1;
  int workers = 4;
  int coupling_cases = 30;
  int adjointness_instances = 30;
  int conservation_instances = 30;
  int primitive_cases = 2000;
  std::size_t max_points = std::size_t{1} << 12;
};

/// The oracle and invariant suite behind the `verify` CLI subcommand.
inline std::vector<CheckResult> run_verification(const VerifyOptions& opt) {
  const std::array<int, 3> refinements = {8, 16, 32};
  std::vector<CheckResult> results;
  results.push_back(check_coupling_oracles(opt.seed, opt.coupling_cases, opt.max_points));
  results.push_back(check_adjointness(opt.seed, opt.adjointness_instances));
  results.push_back(check_conservation(opt.seed, opt.conservation_instances));
  results.push_back(check_schematic_walkthrough());
  results.push_back(check_primitive_oracles(opt.seed, opt.primitive_cases));
  results.push_back(check_determinism(opt.seed, opt.workers));
  results.push_back(check_operation_counts(opt.seed, refinements));
  return results;
}

}  // namespace ib::bench
