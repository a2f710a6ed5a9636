#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace qkr {

// Runs body(i) for i in [0, n) on up to `threads` workers (0 = hardware
// concurrency). Callers write results into pre-sized storage by index and
// reduce afterwards in index order, so the outcome does not depend on
// scheduling. If several workers throw, the exception from the lowest index
// is rethrown.
template <typename Body>
void parallel_for_index(std::size_t n, unsigned threads, Body&& body) {
  if (n == 0) return;
  unsigned hw = std::thread::hardware_concurrency();
  if (threads == 0) threads = hw ? hw : 1;
  if (threads > n) threads = static_cast<unsigned>(n);

  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }

  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        body(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  for (std::size_t i = 0; i < n; ++i) {
    if (errors[i]) std::rethrow_exception(errors[i]);
  }
}

}  // namespace qkr
