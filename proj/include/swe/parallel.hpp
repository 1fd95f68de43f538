#pragma once

#include <algorithm>
#include <thread>
#include <vector>

namespace swe {

/// Worker count: SWE_THREADS when set to a positive integer, otherwise the
/// hardware concurrency (at least 1).
int worker_count();

/// Runs body(i) for i in [begin, end) on up to worker_count() threads, each
/// taking a contiguous block. Every index is processed exactly once, so
/// results that only depend on i are identical for any thread count.
template <typename Body>
void parallel_for(int begin, int end, Body&& body) {
  const int n = end - begin;
  if (n <= 0) return;
  const int workers = std::min(worker_count(), n);
  if (workers <= 1) {
    for (int i = begin; i < end; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  const int chunk = (n + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    const int lo = begin + w * chunk;
    const int hi = std::min(end, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &body] {
      for (int i = lo; i < hi; ++i) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace swe
