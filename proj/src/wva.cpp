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

#include "cosense/wva.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "cosense/errors.hpp"

namespace cosense {
namespace {

constexpr double kPi = std::numbers::pi;

WaveFunction times_x(const WaveFunction& psi) {
  const auto pos = psi.to_position();
  const Grid& g = pos.grid();
  ComplexVector out(pos.amplitudes().begin(), pos.amplitudes().end());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] *= g.x(j);
  return WaveFunction(g, std::move(out));
}

WaveFunction times_p(const WaveFunction& psi) {
  const auto mom = psi.to_momentum();
  const Grid& g = mom.grid();
  ComplexVector out(mom.amplitudes().begin(), mom.amplitudes().end());
  for (std::size_t m = 0; m < out.size(); ++m) out[m] *= g.p(m);
  return WaveFunction(g, std::move(out), Representation::Momentum).to_position();
}

WaveFunction combine(const WaveFunction& a, Complex ca, const WaveFunction& b, Complex cb) {
  const auto pa = a.to_position();
  const auto pb = b.to_position();
  const auto x = pa.amplitudes();
  const auto y = pb.amplitudes();
  ComplexVector out(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) out[j] = ca * x[j] + cb * y[j];
  return WaveFunction(pa.grid(), std::move(out));
}

}  // namespace

PolarizationState PolarizationState::diagonal() {
  const double s = 1.0 / std::sqrt(2.0);
  return {{s, 0.0}, {s, 0.0}};
}

void PolarizationState::validate(double tolerance) const {
  if (std::abs(std::norm(h) + std::norm(v) - 1.0) > tolerance) {
    throw PreconditionError("polarization state is not normalized");
  }
}

Complex inner(const PolarizationState& a, const PolarizationState& b) {
  return std::conj(a.h) * b.h + std::conj(a.v) * b.v;
}

PostSelection PostSelection::from_weak_value_magnitude(double magnitude, WeakValueKind kind) {
  if (!(magnitude > 0.0) || !std::isfinite(magnitude)) {
    throw ConfigError("post_selection.weak_value must be a finite positive number");
  }
  return PostSelection{std::atan(1.0 / magnitude), kind};
}

PolarizationState PostSelection::final_state() const {
  validate();
  if (kind == WeakValueKind::Real) {
    const double chi = kPi / 4.0 - epsilon;
    return {{std::cos(chi), 0.0}, {-std::sin(chi), 0.0}};
  }
  const double s = 1.0 / std::sqrt(2.0);
  return {std::polar(s, epsilon), -std::polar(s, -epsilon)};
}

void PostSelection::validate() const {
  if (!(std::abs(epsilon) > 0.0 && std::abs(epsilon) < kPi / 2.0)) {
    std::ostringstream msg;
    msg << "post_selection.epsilon = " << epsilon << " must satisfy 0 < |epsilon| < pi/2";
    throw ConfigError(msg.str());
  }
}

void ReadoutModel::validate() const {
  if (!(focal_length > 0.0)) throw ConfigError("readout.focal_length must be positive");
  if (!(qpd_gain > 0.0)) throw ConfigError("readout.qpd_gain must be positive");
  if (!(total_power > 0.0)) throw ConfigError("readout.total_power must be positive");
  if (!(position_slope > 0.0)) throw ConfigError("readout.position_slope must be positive");
}

Complex weak_value(const PostSelection& ps) {
  if (std::abs(std::remainder(ps.epsilon, kPi)) < 1e-15) {
    throw PreconditionError("weak value is singular: post-selection orthogonal to |i>");
  }
  const PolarizationState f = ps.final_state();
  const PolarizationState i = PolarizationState::diagonal();
  const Complex denom = inner(f, i);
  if (std::abs(denom) < 1e-12) {
    throw PreconditionError("weak value is singular: post-selection orthogonal to |i>");
  }
  const PolarizationState ai{i.h, -i.v};
  return inner(f, ai) / denom;
}

WvaGuard wva_guard(const Moments& probe, const NetworkGeometry& geom, const KickVector& kicks,
                   const PostSelection& ps) {
  const double n = geom.n_sensors();
  const double k = geom.wave_number;
  const double theta = std::abs(kicks.theta_bar());
  WvaGuard g;
  g.displacement_term =
      std::abs(weak_value(ps)) * geom.z_bar() / (2.0 * k) * n * n * theta * std::sqrt(probe.var_p);
  g.kick_term = n * theta * std::sqrt(probe.var_x);
  return g;
}

double wva_displacement_coefficient(const NetworkGeometry& geom) {
  const double n = geom.n_sensors();
  const double k = geom.wave_number;
  const double zb = geom.z_bar();
  return zb / (2.0 * k) * n * n + (zb / (2.0 * k) + geom.lead_in / k) * n;
}

WvaResult wva_final_probe(const WaveFunction& psi, const NetworkGeometry& geom,
                          const KickVector& kicks, const PostSelection& ps, WvaMethod method) {
  require_normalized(psi);
  geom.validate();
  const PolarizationState f = ps.final_state();
  const PolarizationState i = PolarizationState::diagonal();

  if (method == WvaMethod::FirstOrder) {
    const WvaGuard guard = wva_guard(moments(psi), geom, kicks, ps);
    if (!guard.ok()) {
      std::ostringstream msg;
      msg << "first-order WVA outside its validity guard (displacement term "
          << guard.displacement_term << ", kick term " << guard.kick_term << ", limit "
          << guard.limit << "); use the exact grid method";
      throw PreconditionError(msg.str());
    }
    const double k = geom.wave_number;
    const CompositeEvolution comp = g_params(geom, kicks);
    const Complex aw = weak_value(ps);
    const Complex unit_i{0.0, 1.0};
    const double s = wva_displacement_coefficient(geom) * kicks.theta_bar();
    const double d = (comp.g1 - comp.g2) / (2.0 * k);
    const double beta = comp.net_kick();
    auto raw = combine(psi, 1.0, times_p(psi), -unit_i * (aw * s + d));
    raw = combine(raw, 1.0, times_x(psi), -unit_i * aw * beta);
    // Success probability of the linearized map: |⟨f|i⟩|²·‖{…}ψ‖².
    const double p = std::norm(inner(f, i)) * raw.norm_squared();
    return WvaResult{apply_propagation(raw.normalized(), geom.z_total(), k), p};
  }

  const auto branch_h =
      traverse_sequence(psi, geom, kicks, {TraversalOrder::Forward, false, true});
  const auto branch_v =
      traverse_sequence(psi, geom, kicks, {TraversalOrder::Reverse, true, true});
  const WaveFunction out =
      combine(branch_h, std::conj(f.h) * i.h, branch_v, std::conj(f.v) * i.v);
  const double p = out.norm_squared();
  if (!(p >= 1e-12)) {
    std::ostringstream msg;
    msg << "post-selection success probability " << p << " is below 1e-12";
    throw PreconditionError(msg.str());
  }
  return WvaResult{out.normalized(), p};
}

double predicted_mean_momentum(double var_p, const NetworkGeometry& geom, double theta_bar,
                               const PostSelection& ps, bool small_angle) {
  ps.validate();
  const double amp = small_angle ? 1.0 / ps.epsilon : 1.0 / std::tan(ps.epsilon);
  return 2.0 * amp * var_p * wva_displacement_coefficient(geom) * theta_bar;
}

MomentumReadout momentum_readout(const WaveFunction& psi_f, const ReadoutModel& rm,
                                 double wave_number) {
  rm.validate();
  if (!(wave_number > 0.0)) throw PreconditionError("momentum_readout: k must be positive");
  const Moments m = moments(psi_f);
  const double scale = rm.focal_length / wave_number;
  return {scale * m.mean_p, scale * std::sqrt(m.var_p)};
}

MinimumTilt min_detectable_tilt(const NetworkGeometry& geom, const ProbeSpec& probe,
                                const PostSelection& ps) {
  geom.validate();
  probe.validate();
  ps.validate();
  const double n = geom.n_sensors();
  const double zb = geom.z_bar();
  const double k = geom.wave_number;
  const double bracket = n * n + (1.0 + 2.0 * geom.lead_in / zb) * n;
  const double theta = k * std::abs(ps.epsilon) / (zb * probe.delta_p()) / bracket;
  return {theta, theta / k};
}

QpdSignal qpd_signal(double phi_bar, const NetworkGeometry& geom, const ProbeSpec& probe,
                     const PostSelection& ps, const ReadoutModel& rm) {
  geom.validate();
  probe.validate();
  ps.validate();
  rm.validate();
  const double n = geom.n_sensors();
  const double zb = geom.z_bar();
  const double bracket = n * n + (1.0 + 2.0 * geom.lead_in / zb) * n;
  const double i_delta = zb * rm.total_power /
                         (2.0 * rm.position_slope * std::abs(ps.epsilon) * probe.waist_radius) *
                         bracket * phi_bar;
  return {i_delta, rm.qpd_gain * i_delta};
}

Eigen::Matrix2cd rotation_y(double t) {
  Eigen::Matrix2cd m;
  m << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
  return m;
}

Eigen::Matrix2cd rotation_z(double t) {
  Eigen::Matrix2cd m;
  m << std::polar(1.0, -t), 0.0, 0.0, std::polar(1.0, t);
  return m;
}

Eigen::Matrix2cd quarter_wave_plate(double angle) {
  Eigen::Matrix2cd q0;
  q0 << 1.0, 0.0, 0.0, Complex(0.0, 1.0);
  return rotation_y(angle) * q0 * rotation_y(-angle);
}

Eigen::Matrix2cd half_wave_plate(double angle) {
  Eigen::Matrix2cd h0;
  h0 << 1.0, 0.0, 0.0, -1.0;
  return rotation_y(angle) * h0 * rotation_y(-angle);
}

Eigen::Matrix2cd waveplate_composite(const WaveplateAngles& a) {
  return quarter_wave_plate(a.qwp1) * half_wave_plate(a.hwp) * quarter_wave_plate(a.qwp2);
}

WaveplateAngles waveplate_angles_for_euler(double phi, double xi, double zeta) {
  return {phi - kPi / 4.0, 0.5 * (phi + xi - zeta) - kPi / 4.0, -zeta - kPi / 4.0};
}

WaveplateAngles waveplate_compensation(double delta_theta) {
  return waveplate_angles_for_euler(0.0, 0.5 * delta_theta, 0.0);
}

double max_difference_up_to_phase(const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b) {
  const Complex c = (b.adjoint() * a).trace();
  const Complex phase = std::abs(c) > 0.0 ? c / std::abs(c) : Complex(1.0, 0.0);
  return (a - phase * b).cwiseAbs().maxCoeff();
}

}  // namespace cosense
