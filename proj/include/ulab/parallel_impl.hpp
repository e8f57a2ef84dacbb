// Copyright 2026 The ulab Authors.
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

#ifndef ULAB_PARALLEL_IMPL_HPP_
#define ULAB_PARALLEL_IMPL_HPP_

#include <algorithm>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace ulab {

template <class F>
void parallel_for(int64_t begin, int64_t end, F&& body) {
  const int64_t count = end - begin;
  if (count <= 0) return;
  const int64_t workers = std::min<int64_t>(thread_count(), count);
  if (workers <= 1) {
    for (int64_t i = begin; i < end; ++i) body(i);
    return;
  }
  std::exception_ptr failure;
  std::mutex mu;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int64_t w = 0; w < workers; ++w) {
    const int64_t lo = begin + count * w / workers;
    const int64_t hi = begin + count * (w + 1) / workers;
    pool.emplace_back([&, lo, hi] {
      try {
        for (int64_t i = lo; i < hi; ++i) body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace ulab

#endif  // ULAB_PARALLEL_IMPL_HPP_
