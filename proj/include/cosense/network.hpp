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

#include <string>
#include <string_view>
#include <vector>

#include "cosense/cv_core.hpp"
#include "cosense/joint_state.hpp"

namespace cosense {

/// Distances of the cyclic network: z_0 from the server to the first sensor,
/// z_j between sensors j and j+1, z_N back to the server.
struct NetworkGeometry {
  std::vector<double> distances;  // N+1 entries
  double lead_in = 0.0;           // waist -> network input
  double lead_out = 0.0;          // network output -> detector
  double wave_number = 0.0;

  static NetworkGeometry uniform(int n_sensors, double z_bar, double wave_number,
                                 double lead_in = 0.0, double lead_out = 0.0);

  int n_sensors() const { return static_cast<int>(distances.size()) - 1; }
  double z_bar() const;
  /// (N+1)·z̄, the free-space length of one traversal.
  double loop_length() const;
  /// z_in + (N+1)·z̄ + z_out.
  double z_total() const { return lead_in + loop_length() + lead_out; }

  void validate() const;
};

/// Per-sensor transverse momentum kicks θ_j = k·φ_j.
struct KickVector {
  std::vector<double> thetas;

  static KickVector uniform(int n_sensors, double theta);
  static KickVector from_tilts(const std::vector<double>& tilts, double wave_number);

  std::size_t size() const { return thetas.size(); }
  double sum() const;
  double theta_bar() const;
  std::vector<double> tilt_angles(double wave_number) const;
};

enum class TraversalOrder { Forward, Reverse, Switched };

/// Closed-form reduction of the traversal unitaries:
///   U₊ = e^{-iξ₁/2k} U_{(N+1)z̄} e^{-i g₁P/k} e^{-i (g₁+g₂)X/((N+1)z̄)}
///   U₋ = e^{-iξ₂/2k} U_{(N+1)z̄} e^{-i g₂P/k} e^{-i (g₁+g₂)X/((N+1)z̄)}
struct CompositeEvolution {
  double g1 = 0.0;
  double g2 = 0.0;
  double xi1 = 0.0;
  double xi2 = 0.0;
  TraversalOrder order = TraversalOrder::Switched;
  int n_sensors = 1;
  double z_bar = 1.0;

  double loop_length() const { return (n_sensors + 1) * z_bar; }
  /// Momentum kick (g₁+g₂)/((N+1)z̄) = N·θ̄ common to both orders.
  double net_kick() const { return (g1 + g2) / loop_length(); }
  /// Relative dynamic phase (g₁²-g₂²)/(4k(N+1)z̄) carried by the switched
  /// branches once the common phase -(ξ₁+ξ₂)/4k is dropped.
  double switch_phase(double wave_number) const;
};

enum class SwitchMode { Sequential, QuantumSwitch, ClassicalSwitch, ProbeAloneMixture };

std::string_view to_string(SwitchMode mode);
SwitchMode parse_switch_mode(std::string_view name);
const std::vector<SwitchMode>& all_switch_modes();

/// e^{-iθX}: multiplies ψ(x) by e^{-iθx}.
WaveFunction apply_kick(const WaveFunction& psi, double theta);

/// e^{-i s P}: translates the state by +s.
WaveFunction apply_displacement(const WaveFunction& psi, double shift);

/// e^{-izP²/2k}. Throws GridOverflowError when the predicted centroid plus
/// 2σ radius after the step exceeds half the window.
WaveFunction apply_propagation(const WaveFunction& psi, double z, double wave_number);

/// ψ(x) -> ψ(-x).
WaveFunction apply_parity(const WaveFunction& psi);

CompositeEvolution g_params(const NetworkGeometry& geom, const KickVector& kicks);

struct TraversalOptions {
  TraversalOrder direction = TraversalOrder::Forward;
  bool parity_conjugated = false;  // π U π instead of U
  bool include_leads = false;      // U_{z_out} (·) U_{z_in}
};

/// Operator-by-operator application of U₊ or U₋ on the grid.
WaveFunction traverse_sequence(const WaveFunction& psi, const NetworkGeometry& geom,
                               const KickVector& kicks, TraversalOptions options = {});

/// Applies the reduced form of one branch: forward uses g₁, reverse g₂.
/// With `with_switch_phase` the ∓(g₁²-g₂²)/(4k(N+1)z̄) phase is included.
WaveFunction apply_composite(const WaveFunction& psi, const CompositeEvolution& comp,
                             double wave_number, TraversalOrder branch,
                             bool with_switch_phase = false);

/// Initial switch ancilla: ρ = p₀|0⟩⟨0| + c|0⟩⟨1| + c*|1⟩⟨0| + (1-p₀)|1⟩⟨1|.
struct AncillaState {
  double p0 = 0.5;
  Complex coherence{0.5, 0.0};

  static AncillaState plus() { return {0.5, {0.5, 0.0}}; }
  static AncillaState maximally_mixed() { return {0.5, {0.0, 0.0}}; }
  bool is_pure(double tolerance = 1e-12) const;
};

/// Exact grid construction of the switched joint state. Branch states are
/// the operator products, so the relative dynamic phase is carried by the
/// branches themselves.
JointState switched_joint_state(const WaveFunction& psi, const NetworkGeometry& geom,
                                const KickVector& kicks, SwitchMode mode,
                                const AncillaState& ancilla);

}  // namespace cosense
