#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace pfg::par {

inline int& thread_count_ref() {
  static int count = []() {
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
  }();
  return count;
}

inline int thread_count() { return thread_count_ref(); }

inline void set_thread_count(int n) { thread_count_ref() = std::max(1, n); }

// Runs f(i) for every i in [begin, end). The range is split into fixed-size
// blocks whose boundaries depend only on the range and grain, never on the
// worker count, so any accumulation done per block is reproducible across
// thread counts. Workers pull blocks from a shared counter.
template <class F>
void parallel_for(std::size_t begin, std::size_t end, F&& f, std::size_t grain = 0) {
  if (begin >= end) return;
  const std::size_t range = end - begin;
  if (grain == 0) grain = std::max<std::size_t>(1, range / 256);
  const std::size_t nblocks = (range + grain - 1) / grain;
  const int workers = thread_count();
  if (workers <= 1 || nblocks <= 1) {
    for (std::size_t i = begin; i < end; ++i) f(i);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mutex;

  auto work = [&]() {
    for (;;) {
      const std::size_t b = next.fetch_add(1, std::memory_order_relaxed);
      if (b >= nblocks || failed.load(std::memory_order_relaxed)) return;
      const std::size_t lo = begin + b * grain;
      const std::size_t hi = std::min(end, lo + grain);
      try {
        for (std::size_t i = lo; i < hi; ++i) f(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!failed.exchange(true)) first_error = std::current_exception();
        return;
      }
    }
  };

  const std::size_t spawn =
      std::min<std::size_t>(static_cast<std::size_t>(workers) - 1, nblocks - 1);
  std::vector<std::thread> pool;
  pool.reserve(spawn);
  for (std::size_t t = 0; t < spawn; ++t) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
  if (failed.load()) std::rethrow_exception(first_error);
}

}  // namespace pfg::par
