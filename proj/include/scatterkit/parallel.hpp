#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace scatterkit {

namespace detail {
inline std::atomic<int>& thread_setting() {
  static std::atomic<int> value{0};
  return value;
}

// True on threads currently running a parallel_for body; nested loops run
// inline there.
inline bool& in_parallel_region() {
  thread_local bool flag = false;
  return flag;
}
}  // namespace detail

// Worker count used by parallel_for. 0 means "not set": SCATTERKIT_THREADS is
// consulted, then hardware concurrency.
inline void set_thread_count(int n) { detail::thread_setting().store(n < 0 ? 0 : n); }

inline int thread_count() {
  int n = detail::thread_setting().load();
  if (n > 0) return n;
  if (const char* env = std::getenv("SCATTERKIT_THREADS")) {
    try {
      int v = std::stoi(env);
      if (v > 0) return v;
    } catch (const std::exception&) {
    }
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Runs fn(i) for i in [0, count). Tasks must write only to their own output
// slot; any aggregation happens afterwards in index order, which is what keeps
// results independent of the worker count.
template <typename Fn>
void parallel_for(std::size_t count, Fn&& fn) {
  const std::size_t workers =
      detail::in_parallel_region() ? 1 : std::min<std::size_t>(static_cast<std::size_t>(thread_count()), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto body = [&] {
    struct RegionGuard {
      bool previous = detail::in_parallel_region();
      RegionGuard() { detail::in_parallel_region() = true; }
      ~RegionGuard() { detail::in_parallel_region() = previous; }
    } guard;
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers - 1);
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(body);
    body();
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace scatterkit
