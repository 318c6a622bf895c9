#pragma once

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace axon {

/// Worker cap: AXON_THREADS env var when set (minimum 1), otherwise the
/// hardware concurrency.
inline unsigned worker_count() {
  if (const char* env = std::getenv("AXON_THREADS")) {
    const long n = std::strtol(env, nullptr, 10);
    if (n >= 1) return static_cast<unsigned>(n);
    return 1;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

/// Run body(i) for i in [0, n). Iterations must be independent; results must
/// be written to per-index slots so the outcome does not depend on the
/// schedule. The first exception thrown by any iteration is rethrown.
template <class Body>
void parallel_for(std::size_t n, Body&& body) {
  const unsigned workers = std::min<std::size_t>(worker_count(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (unsigned t = 0; t < workers; ++t) {
    threads.emplace_back([&, t] {
      // Strided assignment: iteration i runs on thread i % workers.
      for (std::size_t i = t; i < n; i += workers) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (auto& th : threads) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace axon
