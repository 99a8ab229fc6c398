#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace mfchaos {

/// Runs fn(i) for i in [0, count) on up to `workers` threads. Each index is
/// executed exactly once; callers write results into slot i so that any
/// reduction done afterwards in index order is independent of scheduling.
/// The first exception thrown by any task is rethrown on the caller.
template <typename Fn>
void parallel_for(std::size_t count, std::size_t workers, Fn &&fn) {
  if (workers <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) {
      fn(i);
    }
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto body = [&] {
    for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) {
          failure = std::current_exception();
        }
        next.store(count);
      }
    }
  };
  std::vector<std::jthread> pool;
  const std::size_t n_threads = workers < count ? workers : count;
  pool.reserve(n_threads);
  for (std::size_t t = 0; t < n_threads; ++t) {
    pool.emplace_back(body);
  }
  pool.clear();
  if (failure) {
    std::rethrow_exception(failure);
  }
}

/// Pairwise (cascade) summation; fixed association order for a given length.
double pairwise_sum(const double *x, std::size_t n);

template <typename Container>
double pairwise_sum(const Container &c) {
  return pairwise_sum(c.data(), c.size());
}

} // namespace mfchaos
