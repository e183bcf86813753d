// Copyright 2026 The upt Authors
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

#include <cstddef>
#include <functional>

namespace upt {

// Worker count: UPT_THREADS when set (>= 1), hardware concurrency otherwise.
std::size_t default_thread_count();

// Runs fn(begin, end) over disjoint chunks of [0, n), possibly on multiple
// threads. Work must be safe to split arbitrarily; callers own determinism
// (per-index seeding, preallocated output slots).
void parallel_for(std::size_t n,
                  const std::function<void(std::size_t, std::size_t)>& fn);

}  // namespace upt
