// Copyright 2026 The genmetrics Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace genmetrics {

// Worker capability handed to the numerical modules. Work is always split
// into tasks whose boundaries are chosen by the caller independently of the
// thread count; the executor only decides which thread runs which task.
class Executor {
 public:
  explicit Executor(std::size_t threads = 1)
      : threads_(std::max<std::size_t>(1, threads)) {}

  std::size_t threads() const { return threads_; }

  // Calls fn(i) for every i in [0, num_tasks). The first exception thrown by
  // any task is rethrown on the calling thread once all workers have joined.
  template <typename Fn>
  void ForEach(std::size_t num_tasks, Fn&& fn) const {
    const std::size_t workers = std::min(threads_, num_tasks);
    if (workers <= 1) {
      for (std::size_t i = 0; i < num_tasks; ++i) fn(i);
      return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mu;
    auto drain = [&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
        if (i >= num_tasks) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mu);
          if (!failure) failure = std::current_exception();
          next.store(num_tasks, std::memory_order_relaxed);
        }
      }
    };
    {
      std::vector<std::jthread> pool;
      pool.reserve(workers - 1);
      for (std::size_t t = 1; t < workers; ++t) pool.emplace_back(drain);
      drain();
    }
    if (failure) std::rethrow_exception(failure);
  }

 private:
  std::size_t threads_;
};

// Splits [0, n) into contiguous blocks of `block` items.
struct BlockRange {
  std::size_t begin;
  std::size_t end;
};

inline std::size_t NumBlocks(std::size_t n, std::size_t block) {
  return (n + block - 1) / block;
}

inline BlockRange Block(std::size_t index, std::size_t n, std::size_t block) {
  const std::size_t begin = index * block;
  return {begin, std::min(n, begin + block)};
}

}  // namespace genmetrics
