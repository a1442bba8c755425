#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

#include "ib/grid.hpp"

namespace ib::bench {

/// Component grids of a MAC discretization on a triply periodic cube: the
/// k-th velocity component lives on the lattice with zero staggering along
/// axis k and half staggering along the others.
inline std::array<StaggeredGrid<3>, 3> mac_grids(int refinement, double edge_cm) {
  const double h = edge_cm / refinement;
  const std::array<int, 3> extents = {refinement, refinement, refinement};
  const std::array<bool, 3> periodic = {true, true, true};
  return {StaggeredGrid<3>(extents, h, {0.0, 0.5, 0.5}, periodic),
          StaggeredGrid<3>(extents, h, {0.5, 0.0, 0.5}, periodic),
          StaggeredGrid<3>(extents, h, {0.5, 0.5, 0.0}, periodic)};
}

/// u = (0, 0, shear_rate * (y - L/2)) sampled on the component grids. The
/// field stands in for the fluid solve and is held fixed across steps.
inline std::array<GridField<3>, 3> shear_field(const std::array<StaggeredGrid<3>, 3>& grids,
                                               double shear_rate, double edge_cm) {
  std::array<GridField<3>, 3> u = {GridField<3>(grids[0]), GridField<3>(grids[1]),
                                   GridField<3>(grids[2])};
  const StaggeredGrid<3>& g = grids[2];
  std::size_t flat = 0;
  for (int iz = 0; iz < g.extent(2); ++iz) {
    for (int iy = 0; iy < g.extent(1); ++iy) {
      const double y = g.spacing() * (iy + g.staggering(1));
      const double value = shear_rate * (y - 0.5 * edge_cm);
      for (int ix = 0; ix < g.extent(0); ++ix) u[2].values[flat++] = value;
    }
  }
  return u;
}

/// n points i.i.d. uniform over [0, L)^3. A single mt19937_64 stream seeded
/// with `seed` draws x, y, z per point as 53-bit uniforms, so point sets are
/// reproducible across platforms and independent of the worker count.
inline PointSet<3> scatter_points(std::uint64_t n, double edge_cm, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  PointSet<3> points(n);
  for (auto& p : points)
    for (std::size_t a = 0; a < 3; ++a)
      p[a] = static_cast<double>(rng() >> 11) * 0x1.0p-53 * edge_cm;
  return points;
}

/// Tether forces F = -k (X - X0) per component, with the displacement taken
/// as the minimal image on the periodic cube so forces stay bounded however
/// many times a point transits the domain.
inline std::array<LagrangianValues, 3> hookean_force(const PointSet<3>& predicted,
                                                     const PointSet<3>& anchors,
                                                     double spring_constant,
                                                     double edge_cm) {
  if (predicted.size() != anchors.size())
    throw std::invalid_argument("point and anchor counts differ");
  std::array<LagrangianValues, 3> force;
  for (auto& component : force) component.resize(predicted.size());
  for (std::size_t j = 0; j < predicted.size(); ++j) {
    for (std::size_t a = 0; a < 3; ++a) {
      double d = predicted[j][a] - anchors[j][a];
      d -= edge_cm * std::round(d / edge_cm);
      force[a][j] = -spring_constant * d;
    }
  }
  return force;
}

}  // namespace ib::bench
