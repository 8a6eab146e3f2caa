// Copyright 2026 The DP Sketch Authors
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

#ifndef DPSKETCH_SRC_PARALLEL_H_
#define DPSKETCH_SRC_PARALLEL_H_

#include <algorithm>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace dpsketch::internal {

inline unsigned WorkerCount(unsigned requested, uint64_t work_items) {
  unsigned threads = requested != 0 ? requested : std::thread::hardware_concurrency();
  threads = std::max(1u, threads);
  return static_cast<unsigned>(std::min<uint64_t>(threads, std::max<uint64_t>(1, work_items)));
}

// Splits [0, count) into one contiguous chunk per worker and calls
// fn(begin, end, worker) on each. The first exception thrown by any worker
// is rethrown after all workers finish.
template <typename Fn>
void ForEachChunk(uint64_t count, unsigned workers, Fn&& fn) {
  if (workers <= 1) {
    fn(uint64_t{0}, count, 0u);
    return;
  }
  std::vector<std::thread> pool;
  std::exception_ptr error;
  std::mutex error_mutex;
  const uint64_t per = (count + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    const uint64_t begin = std::min(count, per * w);
    const uint64_t end = std::min(count, begin + per);
    pool.emplace_back([&, begin, end, w] {
      try {
        fn(begin, end, w);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace dpsketch::internal

#endif  // DPSKETCH_SRC_PARALLEL_H_
