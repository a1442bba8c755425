#pragma once

#include <cassert>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <numbers>

#include "ib/grid.hpp"

namespace ib {

/// A compactly supported 1-D regularized delta kernel. support() is the
/// number of unit intervals spanned by the (closed) support, radius() its
/// half-width; phi(r) vanishes for |r| >= radius().
template <class K>
concept Kernel = requires(const K& k, double r) {
  { k.phi(r) } -> std::convertible_to<double>;
  { k.support() } -> std::convertible_to<int>;
  { k.radius() } -> std::convertible_to<double>;
};

/// phi(r) = (1 + cos(pi r / 2)) / 4 on (-2, 2), zero elsewhere.
inline double cosine_phi(double r) {
  if (!(std::abs(r) < 2.0)) return 0.0;
  return 0.25 * (1.0 + std::cos(0.5 * std::numbers::pi * r));
}

/// The 4-point cosine kernel. Satisfies the zeroth-moment condition
/// sum_j phi(r - j) = 1 exactly (up to rounding) for all r.
class CosineKernel {
public:
  double phi(double r) const { return cosine_phi(r); }
  int support() const { return 4; }
  double radius() const { return 2.0; }
};

/// Number of shifts for a kernel of support size s in D dimensions.
template <std::size_t D>
constexpr std::int64_t shift_count(int support) {
  std::int64_t n = 1;
  for (std::size_t a = 0; a < D; ++a) n *= support;
  return n;
}

/// The j-th shift (1-based) in colexicographic order: each component runs
/// over [-floor(s/2), floor((s-1)/2)], axis 0 varying fastest.
template <std::size_t D>
CellIndex<D> shift(std::int64_t j, int support) {
  assert(j >= 1 && j <= shift_count<D>(support));
  std::int64_t z = j - 1;
  CellIndex<D> sigma;
  for (std::size_t a = 0; a < D; ++a) {
    sigma[a] = static_cast<int>(z % support) - support / 2;
    z /= support;
  }
  return sigma;
}

/// Tensor-product kernel weight delta_h(h*sigma - dx) = prod_a phi(sigma_a -
/// dx_a/h) / h, where dx is the displacement of a point from its associated
/// grid point (cell_index convention).
template <std::size_t D, Kernel K>
double delta_weight(const Vec<D>& dx, const CellIndex<D>& sigma, double h,
                    const K& kernel) {
  double w = 1.0;
  for (std::size_t a = 0; a < D; ++a) w *= kernel.phi(sigma[a] - dx[a] / h) / h;
  return w;
}

}  // namespace ib
