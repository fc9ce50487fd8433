// Copyright 2026 The MGCTM Authors.
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
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace mgctm::parallel {

// Runs fn(i) for i in [0, n) on up to `threads` workers. The first
// exception thrown by any task is rethrown on the calling thread.
template <class Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn) {
  const std::size_t workers =
      std::min<std::size_t>(n, static_cast<std::size_t>(std::max(threads, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
            next.store(n);
          }
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
}

// Deterministic map-reduce over [0, n) split into fixed-size chunks.
// Chunk c always covers the same items and partial results are merged
// into `total` in chunk order, so the result does not depend on
// `threads`. `Acc` must provide clear(); work(begin, end, acc) fills a
// cleared accumulator and merge(total, part) folds one in.
template <class Acc, class Work, class Merge>
void chunked_reduce(std::size_t n, std::size_t chunk_size, int threads,
                    const Acc& prototype, Acc& total, Work&& work, Merge&& merge) {
  const std::size_t num_chunks = (n + chunk_size - 1) / chunk_size;
  const std::size_t wave =
      std::max<std::size_t>(1, std::min<std::size_t>(num_chunks, std::max(threads, 1)));
  std::vector<Acc> parts(wave, prototype);
  for (std::size_t first = 0; first < num_chunks; first += wave) {
    const std::size_t count = std::min(wave, num_chunks - first);
    parallel_for(count, threads, [&](std::size_t i) {
      const std::size_t c = first + i;
      parts[i].clear();
      work(c * chunk_size, std::min(n, (c + 1) * chunk_size), parts[i]);
    });
    for (std::size_t i = 0; i < count; ++i) merge(total, parts[i]);
  }
}

}  // namespace mgctm::parallel
