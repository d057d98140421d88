#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace slowdrift {

/// Number of worker threads for a request of `requested` (0 = one per core).
inline unsigned resolve_workers(unsigned requested) {
  if (requested > 0) {
    return requested;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

/// out[i] = f(i) for i < n on a bounded pool. Results are stored by index, so
/// the output does not depend on scheduling. The first exception thrown by
/// any task is rethrown after all workers have stopped.
template <class T, class F>
std::vector<T> parallel_map(std::size_t n, unsigned workers, F&& f) {
  std::vector<T> out(n);
  const unsigned threads = static_cast<unsigned>(
      std::min<std::size_t>(resolve_workers(workers), std::max<std::size_t>(n, 1)));
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;

  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n || failed.load()) {
        return;
      }
      try {
        out[i] = f(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) {
          error = std::current_exception();
        }
        failed = true;
      }
    }
  };

  if (threads <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back(work);
    }
    for (auto& t : pool) {
      t.join();
    }
  }
  if (error) {
    std::rethrow_exception(error);
  }
  return out;
}

}  // namespace slowdrift
