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

#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <utility>

namespace cosense::detail {
namespace {

// Planning is not thread-safe in FFTW; execution with the new-array
// interface is. Plans are created once per (size, direction) and kept for the
// life of the process.
struct PlanCache {
  std::mutex mutex;
  std::map<std::pair<std::size_t, int>, fftw_plan> plans;

  fftw_plan get(std::size_t n, int sign) {
    std::lock_guard lock(mutex);
    auto key = std::make_pair(n, sign);
    if (auto it = plans.find(key); it != plans.end()) return it->second;
    auto* scratch = fftw_alloc_complex(n);
    fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(n), scratch, scratch, sign,
                                      FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(scratch);
    plans.emplace(key, plan);
    return plan;
  }
};

PlanCache& cache() {
  static PlanCache instance;
  return instance;
}

void execute(std::span<Complex> data, int sign) {
  if (data.empty()) return;
  fftw_plan plan = cache().get(data.size(), sign);
  auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan, ptr, ptr);
}

}  // namespace

void fft_forward(std::span<Complex> data) { execute(data, FFTW_FORWARD); }

void fft_backward(std::span<Complex> data) { execute(data, FFTW_BACKWARD); }

}  // namespace cosense::detail
