#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "stcg/types.hpp"

namespace stcg {

/// Runs body(i) for i in [0, count) on up to `threads` workers. Tasks are
/// handed out dynamically; the first exception thrown by any task is
/// rethrown on the calling thread after all workers have joined.
template <class Body>
void parallel_for(Index count, int threads, Body&& body) {
  if (count <= 0) {
    return;
  }
  const int workers = static_cast<int>(std::min<Index>(std::max(threads, 1), count));
  if (workers == 1) {
    for (Index i = 0; i < count; ++i) {
      body(i);
    }
    return;
  }

  std::atomic<Index> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;

  auto worker = [&] {
    for (;;) {
      const Index i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= count || failed.load(std::memory_order_relaxed)) {
        return;
      }
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) {
          error = std::current_exception();
        }
        failed = true;
      }
    }
  };

  std::vector<std::jthread> pool;
  pool.reserve(workers - 1);
  for (int w = 1; w < workers; ++w) {
    pool.emplace_back(worker);
  }
  worker();
  pool.clear();

  if (error) {
    std::rethrow_exception(error);
  }
}

} // namespace stcg
