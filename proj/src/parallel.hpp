#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>
#include <vector>

namespace esncert::detail {

// Calls task(i) for i in [0, count) on up to `workers` threads. Each index is
// claimed exactly once; the first exception is rethrown after all threads
// join.
template <typename Task>
void parallel_for(long count, int workers, Task&& task) {
  const int threads = static_cast<int>(std::clamp<long>(workers, 1, std::max<long>(count, 1)));
  if (threads == 1) {
    for (long i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<long> next{0};
  std::atomic<bool> stop{false};
  std::exception_ptr error;
  std::atomic_flag error_set = ATOMIC_FLAG_INIT;
  auto worker = [&] {
    for (long i = next++; i < count && !stop; i = next++) {
      try {
        task(i);
      } catch (...) {
        if (!error_set.test_and_set()) error = std::current_exception();
        stop = true;
      }
    }
  };
  std::vector<std::jthread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  pool.clear();
  if (error) std::rethrow_exception(error);
}

}  // namespace esncert::detail
