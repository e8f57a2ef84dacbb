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

#ifndef ULAB_UTIL_HPP_
#define ULAB_UTIL_HPP_

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace ulab {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Raised when a measured quantity contradicts a proven identity.
class NumericalFault : public Error {
 public:
  explicit NumericalFault(const std::string& what) : Error(what) {}
};

uint64_t splitmix64(uint64_t& state);

// Seed for substream `stream` of master seed `seed`.
uint64_t substream_seed(uint64_t seed, uint64_t stream);

class Rng {
 public:
  explicit Rng(uint64_t seed, uint64_t stream = 0)
      : eng_(substream_seed(seed, stream)) {}

  // Uniform on [lo, hi].
  int64_t uniform_int(int64_t lo, int64_t hi) {
    return std::uniform_int_distribution<int64_t>(lo, hi)(eng_);
  }
  double uniform() {
    return std::uniform_real_distribution<double>(0.0, 1.0)(eng_);
  }
  bool bernoulli(double q) { return uniform() < q; }
  std::mt19937_64& engine() { return eng_; }

 private:
  std::mt19937_64 eng_;
};

// Worker count: ULAB_THREADS if set and positive, else hardware concurrency.
int thread_count();

// Runs body(i) for i in [begin, end) over static chunks. body must only write
// to slots owned by i.
template <class F>
void parallel_for(int64_t begin, int64_t end, F&& body);

}  // namespace ulab

#include "ulab/parallel_impl.hpp"

#endif  // ULAB_UTIL_HPP_
