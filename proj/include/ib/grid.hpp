#pragma once

#include <array>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

namespace ib {

template <std::size_t D>
using Vec = std::array<double, D>;

/// Integer cell coordinates. May lie outside [0, extent) on any axis;
/// validity is decided by grid_index().
template <std::size_t D>
using CellIndex = std::array<int, D>;

/// Flat index of a grid point. The maximum representable value is reserved
/// as the out-of-domain sentinel and is never a valid index.
using GridIndex = std::uint32_t;
inline constexpr GridIndex invalid_index = std::numeric_limits<GridIndex>::max();

/// Sort key identifying a grid cell. The maximum representable value is
/// reserved and never produced by cell_key().
using SortKey = std::uint32_t;

/// A regular lattice of points x = h*(i + alpha) + origin, one component
/// grid of a (possibly staggered) discretization.
template <std::size_t D>
class StaggeredGrid {
  static_assert(D >= 1 && D <= 3, "grids are 1-, 2-, or 3-dimensional");

public:
  StaggeredGrid(std::array<int, D> extents, double spacing, Vec<D> staggering,
                std::array<bool, D> periodic, Vec<D> origin = {})
      : extents_(extents),
        spacing_(spacing),
        staggering_(staggering),
        periodic_(periodic),
        origin_(origin) {
    if (!(spacing > 0.0) || !std::isfinite(spacing))
      throw std::invalid_argument("grid spacing must be positive");
    std::uint64_t points = 1;
    std::uint64_t extended = 1;
    for (std::size_t a = 0; a < D; ++a) {
      if (extents_[a] < 1) throw std::invalid_argument("grid extent must be >= 1");
      if (!(staggering_[a] >= 0.0 && staggering_[a] < 1.0))
        throw std::invalid_argument("staggering must lie in [0, 1)");
      points *= static_cast<std::uint64_t>(extents_[a]);
      extended *= static_cast<std::uint64_t>(extents_[a]) + 2;
      // Cells one ghost layer past each end get distinct keys; the whole
      // extended grid must fit in 32-bit keys with the maximum reserved.
      if (extended >= (std::uint64_t{1} << 32))
        throw std::length_error("extended grid exceeds 32-bit key range");
    }
    point_count_ = points;
  }

  int extent(std::size_t axis) const { return extents_[axis]; }
  const std::array<int, D>& extents() const { return extents_; }
  double spacing() const { return spacing_; }
  double staggering(std::size_t axis) const { return staggering_[axis]; }
  const Vec<D>& staggerings() const { return staggering_; }
  bool is_periodic(std::size_t axis) const { return periodic_[axis]; }
  const Vec<D>& origin() const { return origin_; }
  std::size_t point_count() const { return point_count_; }

  /// Physical length of the grid along one axis (extent * spacing).
  double axis_length(std::size_t axis) const { return extents_[axis] * spacing_; }

private:
  std::array<int, D> extents_;
  double spacing_;
  Vec<D> staggering_;
  std::array<bool, D> periodic_;
  Vec<D> origin_;
  std::size_t point_count_;
};

/// Values at every point of one component grid, colexicographic order
/// (axis 0 varies fastest).
template <std::size_t D>
struct GridField {
  StaggeredGrid<D> grid;
  std::vector<double> values;

  explicit GridField(StaggeredGrid<D> g)
      : grid(std::move(g)), values(grid.point_count(), 0.0) {}
};

namespace detail {

inline int wrap_cell(int i, int extent) {
  int r = i % extent;
  if (r < 0) r += extent;
  return r;
}

}  // namespace detail

/// Position of the grid point with cell coordinates i: h*(i + alpha) + origin.
template <std::size_t D>
Vec<D> point_of(const CellIndex<D>& i, const StaggeredGrid<D>& grid) {
  Vec<D> x;
  for (std::size_t a = 0; a < D; ++a)
    x[a] = grid.spacing() * (i[a] + grid.staggering(a)) + grid.origin()[a];
  return x;
}

/// Cell containing x for a kernel of the given support size.
///
/// The returned i satisfies, per axis, dx = x - h*(i + alpha) - origin in
/// (-h, 0] for even support (associated grid point at or above x) and in
/// (-h/2, h/2] for odd support (nearest grid point). With this convention
/// the shifts -floor(s/2) .. floor((s-1)/2) reach every grid point where
/// the kernel is nonzero.
template <std::size_t D>
CellIndex<D> cell_index(const Vec<D>& x, const StaggeredGrid<D>& grid, int support) {
  assert(support >= 1);
  const double half = (support % 2 == 0) ? 0.0 : 0.5;
  CellIndex<D> i;
  for (std::size_t a = 0; a < D; ++a) {
    const double t = (x[a] - grid.origin()[a]) / grid.spacing() - grid.staggering(a);
    i[a] = static_cast<int>(std::ceil(t - half));
  }
  return i;
}

/// Flat index of the grid point with cell coordinates i, or invalid_index if
/// i falls outside the grid on a non-periodic axis. Periodic axes wrap.
/// Flat order is colexicographic with axis 0 varying fastest.
template <std::size_t D>
GridIndex grid_index(const CellIndex<D>& i, const StaggeredGrid<D>& grid) {
  std::size_t flat = 0;
  std::size_t stride = 1;
  for (std::size_t a = 0; a < D; ++a) {
    int c = i[a];
    const int e = grid.extent(a);
    if (grid.is_periodic(a)) {
      c = detail::wrap_cell(c, e);
    } else if (c < 0 || c >= e) {
      return invalid_index;
    }
    flat += static_cast<std::size_t>(c) * stride;
    stride *= static_cast<std::size_t>(e);
  }
  return static_cast<GridIndex>(flat);
}

/// Injective key for the grid cell i. Non-periodic axes admit one ghost
/// layer on each side (i in [-1, extent]); periodic axes are wrapped first,
/// so cells that coincide on the torus share a key. Keys increase strictly
/// with colexicographic cell order.
template <std::size_t D>
SortKey cell_key(const CellIndex<D>& i, const StaggeredGrid<D>& grid) {
  std::uint64_t k = 0;
  std::uint64_t stride = 1;
  for (std::size_t a = 0; a < D; ++a) {
    const int e = grid.extent(a);
    int c = i[a];
    if (grid.is_periodic(a)) c = detail::wrap_cell(c, e);
    assert(c >= -1 && c <= e);
    k += static_cast<std::uint64_t>(c + 1) * stride;
    stride *= static_cast<std::uint64_t>(e) + 2;
  }
  return static_cast<SortKey>(k);
}

/// Inverse of cell_key; k must have been produced by cell_key on this grid.
template <std::size_t D>
CellIndex<D> cell_key_inverse(SortKey k, const StaggeredGrid<D>& grid) {
  CellIndex<D> i;
  std::uint64_t rem = k;
  for (std::size_t a = 0; a < D; ++a) {
    const std::uint64_t stride = static_cast<std::uint64_t>(grid.extent(a)) + 2;
    i[a] = static_cast<int>(rem % stride) - 1;
    rem /= stride;
  }
  assert(rem == 0 && "key out of range for this grid");
  return i;
}

/// Lagrangian point positions.
template <std::size_t D>
using PointSet = std::vector<Vec<D>>;

/// One real value per Lagrangian point: inputs to spreading (force times
/// quadrature weight) or outputs of interpolation.
using LagrangianValues = std::vector<double>;

/// Copy of x with periodic axes folded into [origin, origin + extent*h).
/// Non-periodic coordinates pass through unchanged.
template <std::size_t D>
Vec<D> wrap_position(const Vec<D>& x, const StaggeredGrid<D>& grid) {
  Vec<D> w = x;
  for (std::size_t a = 0; a < D; ++a) {
    if (!grid.is_periodic(a)) continue;
    const double len = grid.axis_length(a);
    double r = std::fmod(x[a] - grid.origin()[a], len);
    if (r < 0.0) r += len;
    w[a] = grid.origin()[a] + r;
  }
  return w;
}

}  // namespace ib
