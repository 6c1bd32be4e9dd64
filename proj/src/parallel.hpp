#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

#include "gflow/parallel.hpp"

namespace gflow::detail {

/// Runs fn(i) for i in [0, count) on up to worker_count(count) threads.
/// fn writes its result into a per-index slot, so output order never
/// depends on scheduling. The first exception is rethrown after joining.
template <class Fn>
void parallel_for(std::size_t count, Fn fn) {
  const unsigned workers = worker_count(count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = next++; i < count; i = next++) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace gflow::detail
