#pragma once

#include <array>
#include <cstdint>
#include <limits>

#include "ib/grid.hpp"

namespace ib::detail {

inline constexpr int max_support = 8;

// Sentinel for support points outside a non-periodic boundary. Any offset
// sum containing it is negative, so validity is a single sign test.
inline constexpr std::int64_t invalid_offset =
    std::numeric_limits<std::int64_t>::min() / 4;

// Stride-scaled flat-index contributions of each axis over the shift range
// of a cell. Summing one entry per axis yields the flat grid index of the
// shifted cell, or a negative value if it has no grid point.
template <std::size_t D>
struct CellOffsets {
  std::array<std::array<std::int64_t, max_support>, D> offset;

  void build(const CellIndex<D>& home, const StaggeredGrid<D>& grid, int support) {
    std::int64_t stride = 1;
    for (std::size_t a = 0; a < D; ++a) {
      const int extent = grid.extent(a);
      for (int k = 0; k < support; ++k) {
        int c = home[a] + k - support / 2;
        if (grid.is_periodic(a)) {
          offset[a][k] = stride * wrap_cell(c, extent);
        } else if (c < 0 || c >= extent) {
          offset[a][k] = invalid_offset;
        } else {
          offset[a][k] = stride * c;
        }
      }
      stride *= extent;
    }
  }
};

// Displacement of a point from its associated grid point, as a fraction of
// the spacing. Computed once per point: every kernel weight in the support
// follows from it.
template <std::size_t D>
Vec<D> displacement_ratio(const Vec<D>& x, const StaggeredGrid<D>& grid, int support) {
  const Vec<D> xw = wrap_position(x, grid);
  const CellIndex<D> home = cell_index(xw, grid, support);
  const Vec<D> hp = point_of(home, grid);
  Vec<D> t;
  for (std::size_t a = 0; a < D; ++a) t[a] = (xw[a] - hp[a]) / grid.spacing();
  return t;
}

// Per-point displacement and write offsets over the support window.
template <std::size_t D>
struct SupportWindow {
  Vec<D> t;  // dx/h per axis
  CellOffsets<D> offsets;

  void build(const Vec<D>& x, const StaggeredGrid<D>& grid, int support) {
    const Vec<D> xw = wrap_position(x, grid);
    const CellIndex<D> home = cell_index(xw, grid, support);
    const Vec<D> hp = point_of(home, grid);
    for (std::size_t a = 0; a < D; ++a) t[a] = (xw[a] - hp[a]) / grid.spacing();
    offsets.build(home, grid, support);
  }
};

// Advances a base-s odometer (axis 0 fastest); the digit sequence follows
// the shift enumeration order.
template <std::size_t D>
inline void advance_digits(std::array<int, D>& digits, int support) {
  for (std::size_t a = 0; a < D; ++a) {
    if (++digits[a] < support) break;
    digits[a] = 0;
  }
}

}  // namespace ib::detail
