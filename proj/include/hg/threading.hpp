#pragma once

#include <cstddef>
#include <thread>
#include <vector>

namespace hg {

/// Static contiguous-chunk parallel loop. Results must go into preallocated
/// per-index slots so the outcome is independent of the thread count.
template <typename Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn) {
  if (n == 0) return;
  std::size_t nWorkers = threads < 1 ? 1 : static_cast<std::size_t>(threads);
  nWorkers = std::min(nWorkers, n);
  if (nWorkers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(nWorkers);
  const std::size_t chunk = (n + nWorkers - 1) / nWorkers;
  for (std::size_t w = 0; w < nWorkers; ++w) {
    const std::size_t lo = w * chunk;
    const std::size_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &fn] {
      for (std::size_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace hg
