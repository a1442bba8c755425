#pragma once

#include <array>
#include <cassert>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "ib/detail/support_window.hpp"
#include "ib/grid.hpp"
#include "ib/kernel.hpp"
#include "ib/parallel.hpp"
#include "ib/reduce.hpp"
#include "ib/sort.hpp"
#include "ib/stats.hpp"

namespace ib {

enum class SpreadAlgorithm { serial, fused, buffered, otf };

/// Reusable buffers for the parallel spreading variants, sized once for a
/// fixed (point count, grid, sweep width) triple. Allocation failures
/// surface here, not inside a spread call; the operations only revalidate
/// sizes. A workspace must not be shared by two concurrent spreads.
template <std::size_t D>
struct SpreadWorkspace {
  std::size_t point_count;
  std::size_t grid_points;
  int sweep_width;  // b; 0 means no per-sweep buffers (fused spreading only)

  std::vector<SortKey> keys;              // one per point
  std::vector<std::uint32_t> perm;        // sorted-order permutation
  std::vector<double> staging;            // point_count x max(b, 1) values
  std::vector<SortKey> run_keys;          // reduce output, q <= point_count
  std::vector<double> run_values;         // q x max(b, 1)
  std::vector<double> displacements;      // per-point dx/h, sorted order
  std::vector<std::int64_t> run_offsets;  // per-run write offsets, q x d x s
  std::vector<double> buffers;            // b output vectors of grid size
  std::size_t run_count = 0;              // q from the most recent spread

  SpreadWorkspace(std::size_t n, const StaggeredGrid<D>& grid, int b = 0)
      : point_count(n), grid_points(grid.point_count()), sweep_width(b) {
    if (b < 0) throw std::invalid_argument("sweep width must be >= 1 (or 0 for none)");
    const std::size_t width = static_cast<std::size_t>(std::max(b, 1));
    keys.resize(n);
    perm.resize(n);
    staging.resize(n * width);
    run_keys.resize(n);
    run_values.resize(n * width);
    displacements.resize(n * D);
    run_offsets.resize(n * D * detail::max_support);
    if (b >= 1) buffers.assign(static_cast<std::size_t>(b) * grid_points, 0.0);
  }
};

namespace detail {

template <std::size_t D>
void check_spread_args(std::size_t n_points, std::size_t n_values, int support) {
  if (n_values != n_points)
    throw std::invalid_argument("one value per point required");
  if (support < 1 || support > max_support)
    throw std::invalid_argument("unsupported kernel support size");
}

template <std::size_t D>
void check_workspace(const SpreadWorkspace<D>& ws, std::size_t n_points,
                     const StaggeredGrid<D>& grid, bool needs_buffers) {
  if (ws.point_count != n_points)
    throw std::invalid_argument("workspace sized for a different point count");
  if (ws.grid_points != grid.point_count())
    throw std::invalid_argument("workspace sized for a different grid");
  if (needs_buffers && ws.sweep_width < 1)
    throw std::invalid_argument("workspace has no sweep buffers");
}

// Common head of the parallel spreading variants: compute one key per point
// from its grid cell, sort the identity permutation by key, collect the
// inhabited cells, cache each point's displacement in sorted order (the
// displacement is computed once; every kernel weight follows from it), and
// decode each run's write offsets once (they are the same for every shift).
// Returns q.
//
// The offset cache is column-major: column (a, k) holds the axis-a, digit-k
// entry of every run, so a fixed shift reads d sequential streams.
template <std::size_t D, Kernel K>
std::size_t prepare_spread(const PointSet<D>& points, const StaggeredGrid<D>& grid,
                           const K& kernel, SpreadWorkspace<D>& ws, int workers) {
  const std::size_t n = points.size();
  const int s = kernel.support();
  parallel_blocks(n, workers, [&](int, std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      const Vec<D> xw = wrap_position(points[i], grid);
      ws.keys[i] = cell_key(cell_index(xw, grid, s), grid);
      ws.perm[i] = static_cast<std::uint32_t>(i);
    }
  });
  key_value_sort<std::uint32_t>(ws.keys, ws.perm, workers);
  const std::size_t q = collect_unique_keys(std::span<const SortKey>(ws.keys),
                                            std::span<SortKey>(ws.run_keys), workers);
  ws.run_count = q;

  parallel_blocks(n, workers, [&](int, std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      const Vec<D> t = displacement_ratio(points[ws.perm[i]], grid, s);
      for (std::size_t a = 0; a < D; ++a) ws.displacements[i * D + a] = t[a];
    }
  });

  parallel_blocks(q, workers, [&](int, std::size_t lo, std::size_t hi) {
    CellOffsets<D> offsets;
    for (std::size_t r = lo; r < hi; ++r) {
      offsets.build(cell_key_inverse(ws.run_keys[r], grid), grid, s);
      for (std::size_t a = 0; a < D; ++a)
        for (int k = 0; k < s; ++k)
          ws.run_offsets[(a * s + k) * q + r] = offsets.offset[a][k];
    }
  });
  return q;
}

}  // namespace detail

/// Reference spreading: for each point, accumulate kernel-weighted values
/// into the output field over the support window. This is the baseline the
/// parallel variants are checked against.
template <std::size_t D, Kernel K>
GridField<D> spread_serial(const PointSet<D>& points, std::span<const double> values,
                           const StaggeredGrid<D>& grid, const K& kernel) {
  detail::check_spread_args<D>(points.size(), values.size(), kernel.support());
  const int s = kernel.support();
  const std::int64_t nshift = shift_count<D>(s);

  GridField<D> out(grid);
  const double h = grid.spacing();
  const int half = s / 2;
  std::uint64_t evals = 0;
  detail::SupportWindow<D> window;
  for (std::size_t i = 0; i < points.size(); ++i) {
    window.build(points[i], grid, s);
    const double value = values[i];
    std::array<int, D> dig{};
    for (std::int64_t j = 0; j < nshift; ++j) {
      double w = kernel.phi((dig[0] - half) - window.t[0]) / h;
      std::int64_t off = window.offsets.offset[0][dig[0]];
      for (std::size_t a = 1; a < D; ++a) {
        w *= kernel.phi((dig[a] - half) - window.t[a]) / h;
        off += window.offsets.offset[a][dig[a]];
      }
      ++evals;
      if (off >= 0) out.values[static_cast<std::size_t>(off)] += w * value;
      detail::advance_digits<D>(dig, s);
    }
  }
  stats::add_delta_evaluations(evals);
  return out;
}

/// Sort-reduce parallel spreading: one key-value sort per call, then for
/// each shift a parallel value computation, a segmented reduce by key, and q
/// contention-free writes (distinct cells target distinct grid points for a
/// fixed shift). Synchronizes once per shift.
template <std::size_t D, Kernel K>
GridField<D> spread_fused(const PointSet<D>& points, std::span<const double> values,
                          const StaggeredGrid<D>& grid, const K& kernel,
                          SpreadWorkspace<D>& ws, int workers) {
  detail::check_spread_args<D>(points.size(), values.size(), kernel.support());
  detail::check_workspace(ws, points.size(), grid, /*needs_buffers=*/false);
  const std::size_t n = points.size();
  const int s = kernel.support();
  const std::int64_t nshift = shift_count<D>(s);
  workers = std::max(workers, 1);

  const std::size_t q = detail::prepare_spread(points, grid, kernel, ws, workers);
  const std::span<const SortKey> keys(ws.keys);
  const double h = grid.spacing();

  GridField<D> out(grid);
  for (std::int64_t j = 1; j <= nshift; ++j) {
    const CellIndex<D> sigma = shift<D>(j, s);
    std::array<const std::int64_t*, D> offset_col;
    for (std::size_t a = 0; a < D; ++a) {
      const std::size_t digit = static_cast<std::size_t>(sigma[a] + s / 2);
      offset_col[a] = ws.run_offsets.data() + (a * s + digit) * q;
    }

    parallel_blocks(n, workers, [&](int, std::size_t lo, std::size_t hi) {
      std::uint64_t evals = 0;
      for (std::size_t i = lo; i < hi; ++i) {
        const double* t = ws.displacements.data() + i * D;
        double w = kernel.phi(sigma[0] - t[0]) / h;
        for (std::size_t a = 1; a < D; ++a) w *= kernel.phi(sigma[a] - t[a]) / h;
        ++evals;
        ws.staging[i] = w * values[ws.perm[i]];
      }
      stats::add_delta_evaluations(evals);
    });

    const std::size_t runs = segmented_reduce(
        keys, std::span<const double>(ws.staging.data(), n), ws.run_keys,
        ws.run_values, workers);
    assert(runs == q);
    (void)runs;

    parallel_blocks(q, workers, [&](int, std::size_t lo, std::size_t hi) {
      for (std::size_t r = lo; r < hi; ++r) {
        std::int64_t off = offset_col[0][r];
        for (std::size_t a = 1; a < D; ++a) off += offset_col[a][r];
        if (off >= 0) out.values[static_cast<std::size_t>(off)] += ws.run_values[r];
      }
    });
  }
  return out;
}

/// Buffered parallel spreading: identical key/sort phase, but each sweep
/// computes up to b kernel values per point, reduces them as rows in one
/// segmented reduce, and writes column k of each reduced row into buffer k.
/// Synchronizes once per sweep (ceil(s^d / b) times) instead of once per
/// shift; the buffers are summed into the result at the end.
template <std::size_t D, Kernel K>
GridField<D> spread_buffered(const PointSet<D>& points, std::span<const double> values,
                             const StaggeredGrid<D>& grid, const K& kernel,
                             SpreadWorkspace<D>& ws, int workers) {
  detail::check_spread_args<D>(points.size(), values.size(), kernel.support());
  detail::check_workspace(ws, points.size(), grid, /*needs_buffers=*/true);
  const std::size_t n = points.size();
  const std::size_t n_grid = grid.point_count();
  const int s = kernel.support();
  const std::int64_t nshift = shift_count<D>(s);
  const int b = ws.sweep_width;
  workers = std::max(workers, 1);

  const std::size_t q = detail::prepare_spread(points, grid, kernel, ws, workers);
  const std::span<const SortKey> keys(ws.keys);
  const double h = grid.spacing();

  parallel_blocks(ws.buffers.size(), workers, [&](int, std::size_t lo, std::size_t hi) {
    std::fill(ws.buffers.begin() + lo, ws.buffers.begin() + hi, 0.0);
  });

  const std::int64_t sweeps = (nshift + b - 1) / b;
  std::vector<CellIndex<D>> sigmas(static_cast<std::size_t>(b));
  std::vector<std::array<const std::int64_t*, D>> offset_col(static_cast<std::size_t>(b));
  for (std::int64_t sweep = 0; sweep < sweeps; ++sweep) {
    const std::int64_t first = sweep * b;  // 0-based index of the sweep's shifts
    const std::size_t width =
        static_cast<std::size_t>(std::min<std::int64_t>(b, nshift - first));
    for (std::size_t k = 0; k < width; ++k) {
      sigmas[k] = shift<D>(first + static_cast<std::int64_t>(k) + 1, s);
      for (std::size_t a = 0; a < D; ++a) {
        const std::size_t digit = static_cast<std::size_t>(sigmas[k][a] + s / 2);
        offset_col[k][a] = ws.run_offsets.data() + (a * s + digit) * q;
      }
    }

    parallel_blocks(n, workers, [&](int, std::size_t lo, std::size_t hi) {
      std::uint64_t evals = 0;
      for (std::size_t i = lo; i < hi; ++i) {
        const double* t = ws.displacements.data() + i * D;
        const double value = values[ws.perm[i]];
        double* stage = ws.staging.data() + i * width;
        for (std::size_t k = 0; k < width; ++k) {
          double w = kernel.phi(sigmas[k][0] - t[0]) / h;
          for (std::size_t a = 1; a < D; ++a) w *= kernel.phi(sigmas[k][a] - t[a]) / h;
          ++evals;
          stage[k] = w * value;
        }
      }
      stats::add_delta_evaluations(evals);
    });

    const std::size_t runs = segmented_reduce_rows(
        keys, std::span<const double>(ws.staging.data(), n * width), width,
        ws.run_keys, ws.run_values, workers);
    assert(runs == q);
    (void)runs;

    parallel_blocks(q, workers, [&](int, std::size_t lo, std::size_t hi) {
      for (std::size_t r = lo; r < hi; ++r) {
        for (std::size_t k = 0; k < width; ++k) {
          std::int64_t off = offset_col[k][0][r];
          for (std::size_t a = 1; a < D; ++a) off += offset_col[k][a][r];
          if (off >= 0)
            ws.buffers[k * n_grid + static_cast<std::size_t>(off)] +=
                ws.run_values[r * width + k];
        }
      }
    });
  }

  GridField<D> out(grid);
  parallel_blocks(n_grid, workers, [&](int, std::size_t lo, std::size_t hi) {
    for (std::size_t m = lo; m < hi; ++m) {
      double acc = 0.0;
      for (int k = 0; k < b; ++k) acc += ws.buffers[static_cast<std::size_t>(k) * n_grid + m];
      out.values[m] = acc;
    }
  });
  return out;
}

/// Buffered spreading with buffer lifetime limited to the call: allocates b
/// grid-sized buffers, spreads, and releases them before returning. Output
/// is identical to spread_buffered on the same inputs; the allocation makes
/// it no faster.
template <std::size_t D, Kernel K>
GridField<D> spread_buffered_otf(const PointSet<D>& points,
                                 std::span<const double> values,
                                 const StaggeredGrid<D>& grid, const K& kernel,
                                 int sweep_width, int workers) {
  if (sweep_width < 1) throw std::invalid_argument("sweep width must be >= 1");
  SpreadWorkspace<D> ws(points.size(), grid, sweep_width);
  return spread_buffered(points, values, grid, kernel, ws, workers);
}

/// Componentwise spreading of a staggered vector quantity. Components run
/// sequentially and may share one workspace (fused/buffered need one).
template <std::size_t D, Kernel K>
std::array<GridField<D>, D> spread_vector(const PointSet<D>& points,
                                          const std::array<LagrangianValues, D>& values,
                                          std::span<const StaggeredGrid<D>> grids,
                                          const K& kernel, SpreadAlgorithm algorithm,
                                          int sweep_width, SpreadWorkspace<D>* workspace,
                                          int workers) {
  if (grids.size() != D)
    throw std::invalid_argument("expected one grid per vector component");
  auto component = [&](std::size_t c) -> GridField<D> {
    switch (algorithm) {
      case SpreadAlgorithm::serial:
        return spread_serial(points, values[c], grids[c], kernel);
      case SpreadAlgorithm::fused:
        if (!workspace) throw std::invalid_argument("fused spreading needs a workspace");
        return spread_fused(points, values[c], grids[c], kernel, *workspace, workers);
      case SpreadAlgorithm::buffered:
        if (!workspace)
          throw std::invalid_argument("buffered spreading needs a workspace");
        return spread_buffered(points, values[c], grids[c], kernel, *workspace, workers);
      case SpreadAlgorithm::otf:
        return spread_buffered_otf(points, values[c], grids[c], kernel, sweep_width,
                                   workers);
    }
    throw std::invalid_argument("unknown spreading algorithm");
  };
  if constexpr (D == 1) return {component(0)};
  if constexpr (D == 2) return {component(0), component(1)};
  if constexpr (D == 3) return {component(0), component(1), component(2)};
}

}  // namespace ib
