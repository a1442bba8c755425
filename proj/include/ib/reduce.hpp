#pragma once

#include <algorithm>
#include <cassert>
#include <cstdint>
#include <span>
#include <vector>

#include "ib/grid.hpp"
#include "ib/parallel.hpp"

namespace ib {

namespace detail {

template <int = 0>
bool keys_sorted(std::span<const SortKey> keys) {
  return std::is_sorted(keys.begin(), keys.end());
}

// Number of maximal equal-key runs that start inside [begin, end).
inline std::size_t count_run_starts(std::span<const SortKey> keys, std::size_t begin,
                                    std::size_t end) {
  std::size_t starts = 0;
  for (std::size_t i = begin; i < end; ++i)
    if (i == 0 || keys[i] != keys[i - 1]) ++starts;
  return starts;
}

}  // namespace detail

namespace detail {

// Writes the first key of each maximal run to out_keys and returns the run
// count; out_keys needs capacity for every run.
inline std::size_t collect_unique_keys(std::span<const SortKey> sorted_keys,
                                       std::span<SortKey> out_keys, int workers) {
  const std::size_t n = sorted_keys.size();
  if (n == 0) return 0;
  workers = std::max(workers, 1);
  std::vector<std::size_t> offsets(workers + 1, 0);
  parallel_blocks(n, workers, [&](int w, std::size_t b, std::size_t e) {
    offsets[w + 1] = count_run_starts(sorted_keys, b, e);
  });
  for (int w = 0; w < workers; ++w) offsets[w + 1] += offsets[w];
  parallel_blocks(n, workers, [&](int w, std::size_t b, std::size_t e) {
    std::size_t out = offsets[w];
    for (std::size_t i = b; i < e; ++i)
      if (i == 0 || sorted_keys[i] != sorted_keys[i - 1]) out_keys[out++] = sorted_keys[i];
  });
  return offsets[workers];
}

}  // namespace detail

/// Number of maximal runs of equal keys in a sorted key array.
inline std::size_t count_unique(std::span<const SortKey> sorted_keys, int workers = 1) {
  assert(detail::keys_sorted(sorted_keys));
  const std::size_t n = sorted_keys.size();
  if (n == 0) return 0;
  workers = std::max(workers, 1);
  std::vector<std::size_t> starts(workers, 0);
  parallel_blocks(n, workers, [&](int w, std::size_t b, std::size_t e) {
    starts[w] = detail::count_run_starts(sorted_keys, b, e);
  });
  std::size_t q = 0;
  for (std::size_t s : starts) q += s;
  return q;
}

/// Sums consecutive rows of `values` (each row `width` doubles, row-major)
/// as long as their keys match. Writes one key and one summed row per run to
/// out_keys/out_values and returns the run count q. out_keys must hold at
/// least q entries and out_values at least q*width.
///
/// Keys must be nondecreasing. Each worker folds a fixed contiguous block in
/// index order; partial sums of runs spanning block boundaries are combined
/// left to right, so results are reproducible at a fixed worker count and
/// reduce to a plain left fold when workers == 1.
inline std::size_t segmented_reduce_rows(std::span<const SortKey> sorted_keys,
                                         std::span<const double> values,
                                         std::size_t width,
                                         std::span<SortKey> out_keys,
                                         std::span<double> out_values, int workers) {
  assert(width >= 1);
  assert(values.size() == sorted_keys.size() * width);
  assert(detail::keys_sorted(sorted_keys));
  const std::size_t n = sorted_keys.size();
  if (n == 0) return 0;
  workers = std::max(workers, 1);

  // Pass 1: run starts per block, then exclusive scan for output offsets.
  std::vector<std::size_t> offsets(workers + 1, 0);
  parallel_blocks(n, workers, [&](int w, std::size_t b, std::size_t e) {
    offsets[w + 1] = detail::count_run_starts(sorted_keys, b, e);
  });
  for (int w = 0; w < workers; ++w) offsets[w + 1] += offsets[w];
  const std::size_t q = offsets[workers];
  assert(out_keys.size() >= q && out_values.size() >= q * width);

  // Pass 2: fold each block. Leading values that continue a run begun in an
  // earlier block accumulate into a per-worker carry.
  std::vector<double> carry(static_cast<std::size_t>(workers) * width, 0.0);
  std::vector<char> has_carry(workers, 0);
  parallel_blocks(n, workers, [&](int w, std::size_t b, std::size_t e) {
    std::size_t i = b;
    if (b > 0 && b < e && sorted_keys[b] == sorted_keys[b - 1]) {
      has_carry[w] = 1;
      double* c = carry.data() + static_cast<std::size_t>(w) * width;
      const SortKey open = sorted_keys[b - 1];
      for (; i < e && sorted_keys[i] == open; ++i)
        for (std::size_t k = 0; k < width; ++k) c[k] += values[i * width + k];
    }
    std::size_t out = offsets[w];
    for (; i < e; ++i) {
      if (i == 0 || sorted_keys[i] != sorted_keys[i - 1]) {
        out_keys[out] = sorted_keys[i];
        for (std::size_t k = 0; k < width; ++k)
          out_values[out * width + k] = values[i * width + k];
        ++out;
      } else {
        for (std::size_t k = 0; k < width; ++k)
          out_values[(out - 1) * width + k] += values[i * width + k];
      }
    }
  });

  // Pass 3: fold carries into the run open at each block boundary, in block
  // order.
  for (int w = 1; w < workers; ++w) {
    if (!has_carry[w]) continue;
    const std::size_t run = offsets[w] - 1;
    const double* c = carry.data() + static_cast<std::size_t>(w) * width;
    for (std::size_t k = 0; k < width; ++k) out_values[run * width + k] += c[k];
  }
  return q;
}

/// Scalar segmented reduce: one value per key.
inline std::size_t segmented_reduce(std::span<const SortKey> sorted_keys,
                                    std::span<const double> values,
                                    std::span<SortKey> out_keys,
                                    std::span<double> out_sums, int workers) {
  return segmented_reduce_rows(sorted_keys, values, 1, out_keys, out_sums, workers);
}

}  // namespace ib
