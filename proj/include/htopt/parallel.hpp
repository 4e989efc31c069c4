// Copyright 2026 The htopt authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <utility>
#include <vector>

namespace htopt {

// Runs fn(i) for i in [0, count) on up to `workers` threads. Each index owns
// its own output slot in the caller, so results are identical for every
// worker count; only wall time changes. The first exception thrown by any
// task is rethrown on the calling thread.
template <class Fn>
void parallel_for(std::int64_t count, int workers, Fn&& fn) {
  if (workers < 1) throw std::invalid_argument("worker count must be >= 1");
  if (count <= 0) return;
  if (workers > count) workers = static_cast<int>(count);
  if (workers == 1) {
    for (std::int64_t i = 0; i < count; ++i) fn(i);
    return;
  }

  std::atomic<std::int64_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto body = [&] {
    while (true) {
      const std::int64_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) pool.emplace_back(body);
  for (std::thread& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace htopt
