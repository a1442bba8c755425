#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>

#include "ib/detail/support_window.hpp"
#include "ib/grid.hpp"
#include "ib/kernel.hpp"
#include "ib/parallel.hpp"
#include "ib/stats.hpp"

namespace ib {

/// Evaluates a grid field at each point through the regularized delta
/// kernel: E_i = h^d * sum over the support of delta_h(x_k - X_i) * e_k.
/// Support points outside a non-periodic boundary contribute nothing. Each
/// point owns its output slot, so any worker count gives the same result as
/// the serial loop.
template <std::size_t D, Kernel K>
LagrangianValues interpolate(const GridField<D>& field, const PointSet<D>& points,
                             const K& kernel, int workers) {
  const StaggeredGrid<D>& grid = field.grid;
  const int s = kernel.support();
  if (s < 1 || s > detail::max_support)
    throw std::invalid_argument("unsupported kernel support size");
  const std::int64_t nshift = shift_count<D>(s);
  const double hd = std::pow(grid.spacing(), static_cast<double>(D));

  const double h = grid.spacing();
  const int half = s / 2;
  LagrangianValues out(points.size());
  parallel_blocks(points.size(), workers, [&](int, std::size_t lo, std::size_t hi) {
    std::uint64_t evals = 0;
    detail::SupportWindow<D> window;
    for (std::size_t i = lo; i < hi; ++i) {
      window.build(points[i], grid, s);
      double acc = 0.0;
      std::array<int, D> dig{};
      for (std::int64_t j = 0; j < nshift; ++j) {
        double w = kernel.phi((dig[0] - half) - window.t[0]) / h;
        std::int64_t off = window.offsets.offset[0][dig[0]];
        for (std::size_t a = 1; a < D; ++a) {
          w *= kernel.phi((dig[a] - half) - window.t[a]) / h;
          off += window.offsets.offset[a][dig[a]];
        }
        ++evals;
        if (off >= 0) acc += w * field.values[static_cast<std::size_t>(off)];
        detail::advance_digits<D>(dig, s);
      }
      out[i] = acc * hd;
    }
    stats::add_delta_evaluations(evals);
  });
  return out;
}

/// Componentwise interpolation of a staggered vector field; each component
/// grid carries its own staggering.
template <std::size_t D, Kernel K>
std::array<LagrangianValues, D> interpolate_vector(std::span<const GridField<D>> fields,
                                                   const PointSet<D>& points,
                                                   const K& kernel, int workers) {
  if (fields.size() != D)
    throw std::invalid_argument("expected one field per vector component");
  std::array<LagrangianValues, D> out;
  for (std::size_t c = 0; c < D; ++c)
    out[c] = interpolate(fields[c], points, kernel, workers);
  return out;
}

}  // namespace ib
