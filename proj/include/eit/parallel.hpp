#pragma once
// Minimal deterministic worker pool: indices are distributed dynamically but
// every result is written to its own slot, so aggregation order is fixed by
// input order regardless of scheduling.

#include <atomic>
#include <cstdlib>
#include <functional>
#include <string>
#include <thread>
#include <vector>

namespace eit::parallel {

// Worker count: explicit argument wins; otherwise the EIT_WORKERS environment
// variable; otherwise hardware concurrency.
inline int worker_count(int requested = 0) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("EIT_WORKERS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

template <typename Fn>
void parallel_for(std::size_t n, int workers, Fn&& fn) {
  workers = worker_count(workers);
  if (workers <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto run = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      fn(i);
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) pool.emplace_back(run);
  for (auto& t : pool) t.join();
}

}  // namespace eit::parallel
