#pragma once

#include <atomic>
#include <cstdint>

namespace ib::stats {

namespace detail {
inline std::atomic<std::uint64_t> delta_evaluations{0};
}

/// Number of tensor-product kernel weights formed by interpolation and
/// spreading since the last reset. Each operation contributes exactly
/// n_points * support^d, independent of the grid size.
inline std::uint64_t delta_evaluations() {
  return detail::delta_evaluations.load(std::memory_order_relaxed);
}

inline void reset_delta_evaluations() {
  detail::delta_evaluations.store(0, std::memory_order_relaxed);
}

inline void add_delta_evaluations(std::uint64_t n) {
  detail::delta_evaluations.fetch_add(n, std::memory_order_relaxed);
}

}  // namespace ib::stats
