// Copyright 2026 The AMS Strands Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <tbb/blocked_range.h>
#include <tbb/parallel_for.h>
#include <tbb/task_arena.h>

#include <cstddef>
#include <memory>

namespace ams {

// Work-stealing map over [0, n). Runs in the caller's arena; every index is
// visited exactly once and callers write only to index-owned slots, so
// results do not depend on the worker count.
template <typename F>
void parallel_for(std::size_t n, F&& body) {
  tbb::parallel_for(tbb::blocked_range<std::size_t>(0, n), [&](const tbb::blocked_range<std::size_t>& r) {
    for (std::size_t i = r.begin(); i != r.end(); ++i) body(i);
  });
}

// Owns a fixed-size worker arena.
class WorkerPool {
 public:
  explicit WorkerPool(int threads = 0)
      : arena_(std::make_unique<tbb::task_arena>(threads > 0 ? threads : tbb::task_arena::automatic)),
        threads_(threads) {}

  template <typename F>
  decltype(auto) run(F&& f) {
    return arena_->execute(std::forward<F>(f));
  }
  int threads() const { return threads_; }

 private:
  std::unique_ptr<tbb::task_arena> arena_;
  int threads_;
};

}  // namespace ams
