/**
 * Copyright 2026 The sinebeta Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */


#ifndef SINEBETA_PARALLEL_HPP
#define SINEBETA_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "sinebeta/rng.hpp"

namespace sinebeta {

/// Worker count from SINEBETA_THREADS, defaulting to the hardware
/// concurrency. Always at least 1.
std::size_t worker_count();

/// Runs fn(rng, replica) for replica = 0..replicas-1, each with its own
/// RandomState(master_seed, replica), and returns the results in replica
/// order. The output does not depend on the number of workers.
template <typename Fn>
auto map_replicas(std::size_t replicas, std::uint64_t master_seed, Fn&& fn)
    -> std::vector<decltype(fn(std::declval<RandomState&>(), std::size_t{}))> {
  using Result = decltype(fn(std::declval<RandomState&>(), std::size_t{}));
  std::vector<Result> out(replicas);
  const std::size_t workers = std::min(worker_count(), std::max<std::size_t>(replicas, 1));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (;;) {
      const std::size_t r = next.fetch_add(1);
      if (r >= replicas) return;
      try {
        RandomState rng(master_seed, r);
        out[r] = fn(rng, r);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(replicas);
        return;
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace sinebeta

#endif  // SINEBETA_PARALLEL_HPP
