// Copyright 2026 The SAM Authors.
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

#ifndef SAM_COMMON_H_
#define SAM_COMMON_H_

#include <algorithm>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>

namespace sam {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Input data violates a documented contract (bad cell, ragged row, missing
// file, unlabeled dataset where labels are required).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A persisted model is malformed or violates a model invariant.
class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Runs body(i) for i in [0, count). Work is split into contiguous chunks over
// at most `max_threads` workers (0 = hardware concurrency). Results must be
// written to per-index slots so the outcome is independent of scheduling. The
// first exception thrown by any worker is rethrown on the calling thread.
inline void ParallelFor(std::size_t count, std::size_t max_threads,
                        const std::function<void(std::size_t)>& body) {
  if (max_threads == 0) {
    max_threads = std::max(1u, std::thread::hardware_concurrency());
  }
  const std::size_t workers = std::min(max_threads, count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    threads.emplace_back([&, w] {
      const std::size_t begin = count * w / workers;
      const std::size_t end = count * (w + 1) / workers;
      try {
        for (std::size_t i = begin; i < end; ++i) body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace sam

#endif  // SAM_COMMON_H_
