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

#include "cosense/cv_core.hpp"

namespace cosense {

/// Probe ⊗ two-level ancilla after a switched traversal.
///
/// The ancilla is |0⟩ for the forward order and |1⟩ for the reverse order.
/// The joint density operator is
///   ρ = p₊|ψ₊⟩⟨ψ₊|⊗|0⟩⟨0| + c|ψ₊⟩⟨ψ₋|⊗|0⟩⟨1| + c*|ψ₋⟩⟨ψ₊|⊗|1⟩⟨0| + p₋|ψ₋⟩⟨ψ₋|⊗|1⟩⟨1|
/// with normalized branches. When `ancilla_traced` is set the label is
/// discarded and only the probe mixture p₊|ψ₊⟩⟨ψ₊| + p₋|ψ₋⟩⟨ψ₋| remains.
struct JointState {
  WaveFunction branch_plus;
  WaveFunction branch_minus;
  double weight_plus = 0.5;
  double weight_minus = 0.5;
  Complex coherence{0.0, 0.0};
  bool ancilla_traced = false;

  /// Positivity and normalization of the ancilla block.
  void validate(double tolerance = 1e-12) const;

  /// |c|² = p₊p₋ with the label kept, i.e. a pure joint vector.
  bool is_pure(double tolerance = 1e-12) const;
};

}  // namespace cosense
