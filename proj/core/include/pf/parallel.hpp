// Copyright 2026 The piecefit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace pf {

/// Runs body(i, worker) for i in [0, n) on up to `workers` threads; `worker`
/// is the thread slot in [0, workers) so callers can keep per-worker scratch.
/// Work is split into contiguous blocks; body must only write state owned by
/// index i (or by its worker slot). The first exception thrown by any worker
/// is rethrown on the caller.
template <typename Body>
void parallel_for_indexed(std::size_t n, int workers, Body&& body) {
  const std::size_t k = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(workers, 1)));
  if (k <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i, std::size_t{0});
    return;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> threads;
  threads.reserve(k);
  for (std::size_t w = 0; w < k; ++w) {
    const std::size_t begin = n * w / k;
    const std::size_t end = n * (w + 1) / k;
    threads.emplace_back([&, begin, end, w] {
      try {
        for (std::size_t i = begin; i < end; ++i) body(i, w);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  if (failure) std::rethrow_exception(failure);
}

template <typename Body>
void parallel_for(std::size_t n, int workers, Body&& body) {
  parallel_for_indexed(n, workers, [&](std::size_t i, std::size_t) { body(i); });
}

}  // namespace pf
