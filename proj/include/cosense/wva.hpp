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

#include <Eigen/Core>

#include "cosense/cv_core.hpp"
#include "cosense/network.hpp"

namespace cosense {

struct PolarizationState {
  Complex h{1.0, 0.0};
  Complex v{0.0, 0.0};

  static PolarizationState horizontal() { return {{1.0, 0.0}, {0.0, 0.0}}; }
  static PolarizationState vertical() { return {{0.0, 0.0}, {1.0, 0.0}}; }
  /// (|H⟩ + |V⟩)/√2
  static PolarizationState diagonal();

  Eigen::Vector2cd vector() const { return {h, v}; }
  void validate(double tolerance = 1e-12) const;
};

/// ⟨a|b⟩
Complex inner(const PolarizationState& a, const PolarizationState& b);

enum class WeakValueKind { Imaginary, Real };

/// Post-selection on |f⟩. Imaginary kind: |f⟩ = (e^{iε}|H⟩ − e^{−iε}|V⟩)/√2,
/// giving A_w = i·cot ε. Real kind: |f⟩ = cos χ|H⟩ − sin χ|V⟩ with
/// χ = π/4 − ε, giving A_w = cot ε with the same success probability.
struct PostSelection {
  double epsilon = 0.1;
  WeakValueKind kind = WeakValueKind::Imaginary;

  /// ε = arccot(|A_w|).
  static PostSelection from_weak_value_magnitude(double magnitude,
                                                 WeakValueKind kind = WeakValueKind::Imaginary);
  PolarizationState final_state() const;
  void validate() const;
};

struct ReadoutModel {
  double focal_length = 0.1;  // m
  double qpd_gain = 1.0e4;    // V/W: 0.5 A/W × 20 kV/A
  double total_power = 2.0e-4;
  double position_slope = 0.65;

  void validate() const;
};

/// ⟨f|Â|i⟩/⟨f|i⟩ with Â = |H⟩⟨H| − |V⟩⟨V| and |i⟩ diagonal.
Complex weak_value(const PostSelection& ps);

enum class WvaMethod { FirstOrder, ExactGrid };

struct WvaResult {
  WaveFunction probe;  // normalized post-selected probe
  double success_probability = 0.0;
};

/// First-order validity measures: |A_w|·(z̄/2k)N²θ̄·ΔP and N·θ̄·ΔX.
struct WvaGuard {
  double displacement_term = 0.0;
  double kick_term = 0.0;
  double limit = 0.05;
  bool ok() const { return displacement_term < limit && kick_term < limit; }
};

WvaGuard wva_guard(const Moments& probe, const NetworkGeometry& geom, const KickVector& kicks,
                   const PostSelection& ps);

/// Post-selected final probe. ExactGrid: both polarization branches on the
/// grid (reverse branch parity-conjugated, leads included), projected on
/// |f⟩. FirstOrder: the linearized evolution
///   U_{z_tot}{1 − iA_w·s·P − i(g₁−g₂)/2k·P − iA_w·Nθ̄·X}ψ,
///   s = (z̄/2k)N²θ̄ + (z̄/2k + z_in/k)Nθ̄,
/// refused with PreconditionError outside the guard.
WvaResult wva_final_probe(const WaveFunction& psi, const NetworkGeometry& geom,
                          const KickVector& kicks, const PostSelection& ps, WvaMethod method);

/// Amplified displacement s above, per unit θ̄: (z̄/2k)N² + (z̄/2k + z_in/k)N.
double wva_displacement_coefficient(const NetworkGeometry& geom);

/// Mean final momentum 2|A_w|·⟨ΔP²⟩·s. `small_angle` replaces cot ε by 1/ε.
double predicted_mean_momentum(double var_p, const NetworkGeometry& geom, double theta_bar,
                               const PostSelection& ps, bool small_angle = false);

struct MomentumReadout {
  double mean = 0.0;    // (f/k)⟨P⟩
  double spread = 0.0;  // (f/k)ΔP
};

MomentumReadout momentum_readout(const WaveFunction& psi_f, const ReadoutModel& rm,
                                 double wave_number);

struct MinimumTilt {
  double theta_bar = 0.0;
  double phi_bar = 0.0;
};

/// δθ̄_min = kε/(z̄ΔP)·1/(N² + (1 + 2z_in/z̄)N).
MinimumTilt min_detectable_tilt(const NetworkGeometry& geom, const ProbeSpec& probe,
                                const PostSelection& ps);

struct QpdSignal {
  double differential_power = 0.0;  // I_Δ, W
  double voltage = 0.0;             // V_Δ = γ·I_Δ
};

/// I_Δ = z̄I₀/(2·slope·ε·w0)·[N² + (1 + 2z_in/z̄)N]·φ̄.
QpdSignal qpd_signal(double phi_bar, const NetworkGeometry& geom, const ProbeSpec& probe,
                     const PostSelection& ps, const ReadoutModel& rm);

// Jones calculus. Angles are fast-axis angles from horizontal.
Eigen::Matrix2cd rotation_y(double t);  // cos t·I − i sin t·σ_y
Eigen::Matrix2cd rotation_z(double t);  // cos t·I − i sin t·σ_z
Eigen::Matrix2cd quarter_wave_plate(double angle);
Eigen::Matrix2cd half_wave_plate(double angle);

struct WaveplateAngles {
  double qwp1 = 0.0;
  double hwp = 0.0;
  double qwp2 = 0.0;
};

/// QWP(qwp1)·HWP(hwp)·QWP(qwp2).
Eigen::Matrix2cd waveplate_composite(const WaveplateAngles& a);

/// Plate angles realizing R_y(φ)R_z(−ξ)R_y(ζ) up to global phase.
WaveplateAngles waveplate_angles_for_euler(double phi, double xi, double zeta);

/// Plates cancelling a relative phase δθ: QWP(−π/4), HWP(δθ/4 − π/4), QWP(−π/4),
/// composing to R_z(−δθ/2).
WaveplateAngles waveplate_compensation(double delta_theta);

/// max_ij |A_ij − e^{iα}B_ij| minimized over the global phase α.
double max_difference_up_to_phase(const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b);

}  // namespace cosense
