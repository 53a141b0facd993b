// Copyright 2026 The buol Authors.
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

#ifndef BUOL_PARALLEL_HPP_
#define BUOL_PARALLEL_HPP_

#include <cstdint>
#include <functional>

namespace buol {

// Process-wide worker count used by the per-cell kernels. Defaults to 1.
void set_thread_count(int threads);
int thread_count();

// Splits [0, n) into contiguous ranges and runs body(begin, end) on each, one
// range per worker. Every kernel writes only the outputs of its own range, so
// results do not depend on the worker count. Exceptions from workers are
// rethrown on the calling thread.
void parallel_for(std::int64_t n,
                  const std::function<void(std::int64_t, std::int64_t)>& body);

}  // namespace buol

#endif  // BUOL_PARALLEL_HPP_
