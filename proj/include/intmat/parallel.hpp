#pragma once

#include <algorithm>
#include <cstdint>
#include <exception>
#include <thread>
#include <utility>
#include <vector>

namespace intmat {

inline unsigned default_workers() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

/// Half-open slice [begin, end) of `total` items owned by `worker`.
struct Slice {
  std::uint64_t begin = 0;
  std::uint64_t end = 0;
};

inline Slice slice_for(std::uint64_t total, unsigned workers, unsigned worker) {
  const std::uint64_t base = total / workers, extra = total % workers;
  const std::uint64_t begin = worker * base + std::min<std::uint64_t>(worker, extra);
  return {begin, begin + base + (worker < extra ? 1 : 0)};
}

/// Runs fn(worker) for worker = 0..workers-1 and returns the per-worker
/// results in worker order. The caller combines them, so reductions do not
/// depend on scheduling.
template <class Fn>
auto run_workers(unsigned workers, Fn&& fn) {
  using R = decltype(fn(0u));
  workers = std::max(1u, workers);
  std::vector<R> results(workers);
  if (workers == 1) {
    results[0] = fn(0u);
    return results;
  }
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> threads;
    threads.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      threads.emplace_back([&, w] {
        try {
          results[w] = fn(w);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return results;
}

}  // namespace intmat
