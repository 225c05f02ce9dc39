#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace reebflow {

// Worker count: REEBFLOW_THREADS when set to a positive integer, otherwise
// the hardware concurrency (at least 1).
unsigned thread_count();

// Evaluates fn(i) for i in [0, n) and returns the results in index order.
// The first exception (lowest index) is rethrown after all workers join.
template <typename T, typename Fn>
std::vector<T> parallel_map(std::size_t n, Fn&& fn) {
  std::vector<T> out(n);
  std::vector<std::exception_ptr> errors(n);
  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(thread_count(), n == 0 ? 1 : n));
  auto body = [&](unsigned w) {
    for (std::size_t i = w; i < n; i += workers) {
      try {
        out[i] = fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    body(0);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(body, w);
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace reebflow
