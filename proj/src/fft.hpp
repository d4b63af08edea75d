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

#include <span>

#include "cosense/cv_core.hpp"

namespace cosense::detail {

/// In-place unnormalized DFT, X_m = Σ_j x_j e^{-2πi jm/n}.
void fft_forward(std::span<Complex> data);

/// In-place unnormalized inverse DFT, x_j = Σ_m X_m e^{+2πi jm/n}.
void fft_backward(std::span<Complex> data);

}  // namespace cosense::detail
