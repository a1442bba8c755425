#pragma once

#include <cassert>
#include <cstdint>
#include <span>
#include <vector>

#include "ib/grid.hpp"
#include "ib/parallel.hpp"

namespace ib {

/// Stable in-place key-value sort on 32-bit keys: LSD radix, 8-bit digits,
/// per-worker histograms and prefix sums. Equal keys keep their input order,
/// so the output is the same for every worker count.
template <class Payload>
void key_value_sort(std::span<SortKey> keys, std::span<Payload> payload, int workers) {
  assert(keys.size() == payload.size());
  const std::size_t n = keys.size();
  if (n < 2) return;
  workers = std::max(workers, 1);

  constexpr int digit_bits = 8;
  constexpr int digits = 256;
  constexpr int passes = 32 / digit_bits;

  std::vector<SortKey> key_buf(n);
  std::vector<Payload> payload_buf(n);
  std::vector<std::size_t> hist(static_cast<std::size_t>(workers) * digits);

  SortKey* src_k = keys.data();
  SortKey* dst_k = key_buf.data();
  Payload* src_p = payload.data();
  Payload* dst_p = payload_buf.data();

  for (int pass = 0; pass < passes; ++pass) {
    const int shift = pass * digit_bits;
    std::fill(hist.begin(), hist.end(), std::size_t{0});

    parallel_blocks(n, workers, [&](int w, std::size_t b, std::size_t e) {
      std::size_t* h = hist.data() + static_cast<std::size_t>(w) * digits;
      for (std::size_t i = b; i < e; ++i) ++h[(src_k[i] >> shift) & (digits - 1)];
    });

    // Exclusive scan, digit-major then worker-minor, so each worker scatters
    // its block contiguously after all lower digits and all earlier workers.
    std::size_t sum = 0;
    for (int d = 0; d < digits; ++d) {
      for (int w = 0; w < workers; ++w) {
        std::size_t& h = hist[static_cast<std::size_t>(w) * digits + d];
        const std::size_t count = h;
        h = sum;
        sum += count;
      }
    }

    parallel_blocks(n, workers, [&](int w, std::size_t b, std::size_t e) {
      std::size_t* cursor = hist.data() + static_cast<std::size_t>(w) * digits;
      for (std::size_t i = b; i < e; ++i) {
        const std::size_t pos = cursor[(src_k[i] >> shift) & (digits - 1)]++;
        dst_k[pos] = src_k[i];
        dst_p[pos] = src_p[i];
      }
    });

    std::swap(src_k, dst_k);
    std::swap(src_p, dst_p);
  }
  // An even number of passes lands the result back in the caller's arrays.
  static_assert(passes % 2 == 0);
}

}  // namespace ib
