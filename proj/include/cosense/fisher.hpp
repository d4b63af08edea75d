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

#include <array>
#include <cmath>
#include <functional>

#include <Eigen/Core>

#include "cosense/cv_core.hpp"
#include "cosense/joint_state.hpp"
#include "cosense/network.hpp"

namespace cosense {

/// Symmetric 2×2 QFIM over (g₁, g₂).
struct Qfim2 {
  double q11 = 0.0;
  double q12 = 0.0;
  double q22 = 0.0;

  Eigen::Matrix2d matrix() const;
  double trace() const { return q11 + q22; }
  double determinant() const { return q11 * q22 - q12 * q12; }
  /// Ascending.
  std::array<double, 2> eigenvalues() const;
  /// Smallest eigenvalue >= -tol·trace.
  bool is_psd(double relative_tolerance = 1e-10) const;

  Qfim2 operator+(const Qfim2& o) const { return {q11 + o.q11, q12 + o.q12, q22 + o.q22}; }
  Qfim2 operator-(const Qfim2& o) const { return {q11 - o.q11, q12 - o.q12, q22 - o.q22}; }
  Qfim2 operator*(double s) const { return {s * q11, s * q12, s * q22}; }
};

/// ‖a − ref‖_F / ‖ref‖_F.
double relative_frobenius_error(const Qfim2& a, const Qfim2& ref);

/// Scalar ingredients of the closed-form QFIMs.
struct GeneratorMoments {
  double var_x = 0.0;
  double var_p = 0.0;
  double cov_xp = 0.0;
  double mean_p = 0.0;
  double g1 = 0.0;
  double g2 = 0.0;
  double wave_number = 1.0;
  double z_bar = 1.0;
  int n_sensors = 1;

  static GeneratorMoments from(const Moments& m, double wave_number, double z_bar,
                               int n_sensors, double g1 = 0.0, double g2 = 0.0);
  static GeneratorMoments gaussian(const ProbeSpec& probe, double z_bar, int n_sensors);

  double loop_length() const { return (n_sensors + 1) * z_bar; }
  void validate() const;
};

struct QcrbReport {
  SwitchMode strategy = SwitchMode::Sequential;
  int n_sensors = 1;
  double bound = 0.0;  // variance bound on θ̄
  int trials = 1;

  double scaled_bound() const;                                  // bound·N⁴
  double precision() const;                                     // √(ν·bound)
  double per_shot_precision() const { return std::sqrt(bound); }
};

Qfim2 qfim_sequential(const GeneratorMoments& gm);
/// Fixed reverse order: the sequential matrix with g₁ and g₂ exchanged.
Qfim2 qfim_sequential_reverse(const GeneratorMoments& gm);
/// Pure ancilla with forward weight p (½ for the balanced superposition).
Qfim2 qfim_quantum_switch(const GeneratorMoments& gm, double forward_weight = 0.5);
Qfim2 qfim_classical_switch(const GeneratorMoments& gm);
/// Rank-one QFIM of the traced probe at g = 0: Var(ℋ₀)·[[1,1],[1,1]].
Qfim2 qfim_probe_alone_at_origin(const GeneratorMoments& gm);

/// 𝒞 = G Q⁻¹ Gᵀ, G = [1,1]/(N(N+1)z̄). A singular Q is handled on its
/// range; NotEstimableError if G has a component along the null vector.
QcrbReport qcrb_global(const Qfim2& q, int n_sensors, double z_bar, int trials = 1,
                       SwitchMode strategy = SwitchMode::Sequential);

// Closed-form bounds.
double qcrb_sequential_closed_form(const GeneratorMoments& gm);
double qcrb_quantum_switch_closed_form(const GeneratorMoments& gm);
double qcrb_classical_switch_closed_form(const GeneratorMoments& gm);
/// 1/(N²(N+1)²z̄²·Var ℋ₀), ℋ₀ = P/k + 2X/((N+1)z̄).
QcrbReport probe_alone_qfi_at_origin(const GeneratorMoments& gm, int trials = 1);

/// Closed-form report for any strategy (probe-alone evaluated at g = 0).
QcrbReport qcrb_for_mode(SwitchMode mode, const GeneratorMoments& gm, int trials = 1);

/// Asymptotic value of 𝒞·N⁴ for either switch: k²/(z̄²⟨ΔP²⟩).
double switch_scaling_limit(const GeneratorMoments& gm);

using JointStateBuilder = std::function<JointState(double g1, double g2)>;

/// Builds the final joint state from the reduced evolution for given (g₁, g₂).
/// The quantum-switch branches carry the ∓(g₁²−g₂²)/(4k(N+1)z̄) phases.
JointStateBuilder analytic_joint_state_builder(const WaveFunction& psi, double wave_number,
                                               double z_bar, int n_sensors, SwitchMode mode,
                                               double forward_weight = 0.5);

struct NumericalQfimOptions {
  double relative_step = 1e-4;
  /// Typical size of g over which the state changes appreciably. The
  /// difference step is relative_step·max(|g|, scale).
  double scale = 1.0;
  double richardson_tolerance = 1e-2;
  /// Eigenvalues of the traced probe below this are treated as zero.
  double rank_tolerance = 1e-12;
};

/// Natural g scale for a probe: 1/(ΔX/((N+1)z̄) + ΔP/k).
double natural_g_scale(const Moments& m, double wave_number, double loop_length);

/// Finite-difference QFIM of the state produced by `builder` at (g₁, g₂).
/// Pure joint states use the pure-state formula; labelled mixtures the
/// branch average; traced mixtures the spectral formula on span{ψ₊, ψ₋}.
Qfim2 qfim_numerical(const JointStateBuilder& builder, double g1, double g2,
                     const NumericalQfimOptions& options = {});

}  // namespace cosense
