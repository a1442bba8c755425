#pragma once

#include <omp.h>

#include <algorithm>
#include <cstddef>
#include <utility>

namespace ib {

/// Contiguous block [begin, end) owned by worker w when n items are split
/// across `workers` blocks. Blocking depends only on (n, workers), never on
/// which thread executes a block, so results are reproducible at a fixed
/// worker count.
inline std::pair<std::size_t, std::size_t> block_range(std::size_t n, int workers,
                                                       int w) {
  const auto p = static_cast<std::size_t>(workers);
  const auto i = static_cast<std::size_t>(w);
  return {n * i / p, n * (i + 1) / p};
}

/// Runs f(worker, begin, end) once per block. Blocks may execute on any
/// thread; f must write only to locations owned by its block.
template <class F>
void parallel_blocks(std::size_t n, int workers, F&& f) {
  workers = std::max(workers, 1);
  if (workers == 1) {
    f(0, std::size_t{0}, n);
    return;
  }
#pragma omp parallel for schedule(static) num_threads(workers)
  for (int w = 0; w < workers; ++w) {
    auto [begin, end] = block_range(n, workers, w);
    f(w, begin, end);
  }
}

}  // namespace ib
