// Copyright 2026 The cosense Authors
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

#include <cstddef>
#include <functional>

namespace cosense {

/// Thread count: `requested` if positive, else $COSENSE_THREADS, else the
/// hardware concurrency. Never less than 1.
unsigned resolve_thread_count(int requested = 0);

/// Runs fn(0..n-1) on up to `threads` workers. Results must be written by
/// index so output order never depends on scheduling. The first exception
/// thrown by any task is rethrown after all workers join.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn);

}  // namespace cosense
