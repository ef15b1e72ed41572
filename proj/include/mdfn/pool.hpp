#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace mdfn {

/// Runs `count` independent jobs on at most `threads` workers. Each job
/// writes only to its own result slot, so aggregation order is deterministic
/// regardless of scheduling. The first exception thrown by any job is
/// rethrown on the calling thread after all workers finish.
inline void parallel_for(std::size_t count, unsigned threads,
                         const std::function<void(std::size_t)> &job) {
  if (count == 0)
    return;
  unsigned n = threads == 0 ? std::thread::hardware_concurrency() : threads;
  if (n == 0)
    n = 1;
  if (n > count)
    n = static_cast<unsigned>(count);
  if (n == 1) {
    for (std::size_t i = 0; i < count; ++i)
      job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::atomic<bool> has_error{false};
  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count)
        return;
      try {
        job(i);
      } catch (...) {
        bool expected = false;
        if (has_error.compare_exchange_strong(expected, true))
          first_error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(n);
  for (unsigned t = 0; t < n; ++t)
    pool.emplace_back(worker);
  for (auto &t : pool)
    t.join();
  if (has_error)
    std::rethrow_exception(first_error);
}

} // namespace mdfn
