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

#include "cosense/network.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "cosense/errors.hpp"

namespace cosense {
namespace {

template <typename PhaseFn>
WaveFunction multiply_position(const WaveFunction& psi, PhaseFn phase) {
  const auto pos = psi.to_position();
  const Grid& g = pos.grid();
  ComplexVector out(pos.amplitudes().begin(), pos.amplitudes().end());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] *= std::polar(1.0, phase(g.x(j)));
  return WaveFunction(g, std::move(out));
}

template <typename PhaseFn>
WaveFunction multiply_momentum(const WaveFunction& psi, PhaseFn phase) {
  const auto mom = psi.to_momentum();
  const Grid& g = mom.grid();
  ComplexVector out(mom.amplitudes().begin(), mom.amplitudes().end());
  for (std::size_t m = 0; m < out.size(); ++m) out[m] *= std::polar(1.0, phase(g.p(m)));
  return WaveFunction(g, std::move(out), Representation::Momentum).to_position();
}

}  // namespace

void JointState::validate(double tolerance) const {
  if (!(branch_plus.grid() == branch_minus.grid())) {
    throw PreconditionError("joint state branches live on different grids");
  }
  if (weight_plus < -tolerance || weight_minus < -tolerance ||
      std::abs(weight_plus + weight_minus - 1.0) > tolerance) {
    throw PreconditionError("joint state branch weights must be a probability pair");
  }
  if (std::norm(coherence) > weight_plus * weight_minus + tolerance) {
    throw PreconditionError("joint state coherence violates positivity");
  }
}

bool JointState::is_pure(double tolerance) const {
  if (ancilla_traced) return false;
  return std::abs(std::norm(coherence) - weight_plus * weight_minus) <= tolerance;
}

NetworkGeometry NetworkGeometry::uniform(int n_sensors, double z_bar, double wave_number,
                                         double lead_in, double lead_out) {
  if (n_sensors < 1) throw ConfigError("geometry: number of sensors must be >= 1");
  NetworkGeometry g;
  g.distances.assign(static_cast<std::size_t>(n_sensors) + 1, z_bar);
  g.lead_in = lead_in;
  g.lead_out = lead_out;
  g.wave_number = wave_number;
  g.validate();
  return g;
}

double NetworkGeometry::z_bar() const {
  return std::accumulate(distances.begin(), distances.end(), 0.0) /
         static_cast<double>(distances.size());
}

double NetworkGeometry::loop_length() const {
  return std::accumulate(distances.begin(), distances.end(), 0.0);
}

void NetworkGeometry::validate() const {
  if (distances.size() < 2) {
    throw ConfigError("geometry.distances needs N+1 >= 2 entries");
  }
  for (std::size_t j = 0; j < distances.size(); ++j) {
    if (!(distances[j] >= 0.0) || !std::isfinite(distances[j])) {
      std::ostringstream msg;
      msg << "geometry.distances[" << j << "] must be a finite length >= 0";
      throw ConfigError(msg.str());
    }
  }
  if (!(z_bar() > 0.0)) throw ConfigError("geometry: mean distance must be positive");
  if (!(lead_in >= 0.0)) throw ConfigError("geometry.z_in must be >= 0");
  if (!(lead_out >= 0.0)) throw ConfigError("geometry.z_out must be >= 0");
  if (!(wave_number > 0.0)) throw ConfigError("geometry: wave number must be positive");
}

KickVector KickVector::uniform(int n_sensors, double theta) {
  return KickVector{std::vector<double>(static_cast<std::size_t>(n_sensors), theta)};
}

KickVector KickVector::from_tilts(const std::vector<double>& tilts, double wave_number) {
  KickVector kv;
  kv.thetas.reserve(tilts.size());
  for (double phi : tilts) kv.thetas.push_back(wave_number * phi);
  return kv;
}

double KickVector::sum() const { return std::accumulate(thetas.begin(), thetas.end(), 0.0); }

double KickVector::theta_bar() const {
  return thetas.empty() ? 0.0 : sum() / static_cast<double>(thetas.size());
}

std::vector<double> KickVector::tilt_angles(double wave_number) const {
  std::vector<double> out;
  out.reserve(thetas.size());
  for (double t : thetas) out.push_back(t / wave_number);
  return out;
}

double CompositeEvolution::switch_phase(double wave_number) const {
  return (g1 * g1 - g2 * g2) / (4.0 * wave_number * loop_length());
}

std::string_view to_string(SwitchMode mode) {
  switch (mode) {
    case SwitchMode::Sequential: return "sequential";
    case SwitchMode::QuantumSwitch: return "quantum_switch";
    case SwitchMode::ClassicalSwitch: return "classical_switch";
    case SwitchMode::ProbeAloneMixture: return "probe_alone";
  }
  return "unknown";
}

SwitchMode parse_switch_mode(std::string_view name) {
  for (SwitchMode m : all_switch_modes()) {
    if (to_string(m) == name) return m;
  }
  throw ConfigError("unknown switch mode '" + std::string(name) +
                    "' (expected sequential, quantum_switch, classical_switch, probe_alone)");
}

const std::vector<SwitchMode>& all_switch_modes() {
  static const std::vector<SwitchMode> modes = {
      SwitchMode::Sequential, SwitchMode::QuantumSwitch, SwitchMode::ClassicalSwitch,
      SwitchMode::ProbeAloneMixture};
  return modes;
}

WaveFunction apply_kick(const WaveFunction& psi, double theta) {
  if (theta == 0.0) return psi.to_position();
  return multiply_position(psi, [theta](double x) { return -theta * x; });
}

WaveFunction apply_displacement(const WaveFunction& psi, double shift) {
  if (shift == 0.0) return psi.to_position();
  return multiply_momentum(psi, [shift](double p) { return -shift * p; });
}

WaveFunction apply_propagation(const WaveFunction& psi, double z, double wave_number) {
  if (z < 0.0) throw PreconditionError("apply_propagation: distance must be >= 0");
  if (!(wave_number > 0.0)) throw PreconditionError("apply_propagation: k must be positive");
  if (z == 0.0) return psi.to_position();

  const Moments m = moments(psi);
  const double t = z / wave_number;
  const double var_x = m.var_x + t * t * m.var_p + 2.0 * t * m.cov_xp;
  const double reach = std::abs(m.mean_x + t * m.mean_p) + 2.0 * std::sqrt(var_x);
  if (reach > 0.5 * psi.grid().half_extent()) {
    std::ostringstream msg;
    msg << "propagation by " << z << " m reaches " << reach
        << " m, beyond half of the grid half extent " << psi.grid().half_extent() << " m";
    throw GridOverflowError(msg.str());
  }
  const double c = -z / (2.0 * wave_number);
  return multiply_momentum(psi, [c](double p) { return c * p * p; });
}

WaveFunction apply_parity(const WaveFunction& psi) {
  const auto pos = psi.to_position();
  const Grid& g = pos.grid();
  const auto a = pos.amplitudes();
  ComplexVector out(a.size());
  for (std::size_t j = 0; j < a.size(); ++j) out[j] = a[g.mirror_index(j)];
  return WaveFunction(g, std::move(out));
}

CompositeEvolution g_params(const NetworkGeometry& geom, const KickVector& kicks) {
  geom.validate();
  const int n = geom.n_sensors();
  if (kicks.size() != static_cast<std::size_t>(n)) {
    std::ostringstream msg;
    msg << "g_params: " << kicks.size() << " kicks for " << n << " sensors";
    throw PreconditionError(msg.str());
  }
  // thetas[l-1] is θ_l. tail(j) = Σ_{l>j} θ_l, head(j) = Σ_{l<=j} θ_l.
  CompositeEvolution c;
  c.n_sensors = n;
  c.z_bar = geom.z_bar();
  c.order = TraversalOrder::Switched;
  const double total = kicks.sum();
  double head = 0.0;
  for (int j = 0; j <= n; ++j) {
    if (j >= 1) head += kicks.thetas[static_cast<std::size_t>(j - 1)];
    const double tail = total - head;
    const double z = geom.distances[static_cast<std::size_t>(j)];
    if (j <= n - 1) {
      c.g1 += z * tail;
      c.xi1 += z * tail * tail;
    }
    if (j >= 1) {
      c.g2 += z * head;
      c.xi2 += z * head * head;
    }
  }
  return c;
}

WaveFunction traverse_sequence(const WaveFunction& psi, const NetworkGeometry& geom,
                               const KickVector& kicks, TraversalOptions options) {
  geom.validate();
  require_normalized(psi);
  const int n = geom.n_sensors();
  if (kicks.size() != static_cast<std::size_t>(n)) {
    throw PreconditionError("traverse_sequence: kick count does not match sensor count");
  }
  if (options.direction == TraversalOrder::Switched) {
    throw PreconditionError("traverse_sequence: direction must be forward or reverse");
  }
  const double k = geom.wave_number;
  auto state = psi.to_position();
  if (options.include_leads) state = apply_propagation(state, geom.lead_in, k);
  if (options.parity_conjugated) state = apply_parity(state);

  const auto z = [&](int j) { return geom.distances[static_cast<std::size_t>(j)]; };
  const auto theta = [&](int l) { return kicks.thetas[static_cast<std::size_t>(l - 1)]; };
  if (options.direction == TraversalOrder::Forward) {
    // U_{z_N} U_{θ_N} ... U_{z_1} U_{θ_1} U_{z_0}
    state = apply_propagation(state, z(0), k);
    for (int l = 1; l <= n; ++l) {
      state = apply_kick(state, theta(l));
      state = apply_propagation(state, z(l), k);
    }
  } else {
    // U_{z_0} U_{θ_1} U_{z_1} ... U_{θ_N} U_{z_N}
    state = apply_propagation(state, z(n), k);
    for (int l = n; l >= 1; --l) {
      state = apply_kick(state, theta(l));
      state = apply_propagation(state, z(l - 1), k);
    }
  }

  if (options.parity_conjugated) state = apply_parity(state);
  if (options.include_leads) state = apply_propagation(state, geom.lead_out, k);
  return state;
}

WaveFunction apply_composite(const WaveFunction& psi, const CompositeEvolution& comp,
                             double wave_number, TraversalOrder branch,
                             bool with_switch_phase) {
  if (branch == TraversalOrder::Switched) {
    throw PreconditionError("apply_composite: branch must be forward or reverse");
  }
  const bool forward = branch == TraversalOrder::Forward;
  auto state = apply_kick(psi.to_position(), comp.net_kick());
  state = apply_displacement(state, (forward ? comp.g1 : comp.g2) / wave_number);
  state = apply_propagation(state, comp.loop_length(), wave_number);
  if (with_switch_phase) {
    const double phi = comp.switch_phase(wave_number);
    state = state.scaled(std::polar(1.0, forward ? -phi : phi));
  }
  return state;
}

bool AncillaState::is_pure(double tolerance) const {
  return std::abs(std::norm(coherence) - p0 * (1.0 - p0)) <= tolerance;
}

JointState switched_joint_state(const WaveFunction& psi, const NetworkGeometry& geom,
                                const KickVector& kicks, SwitchMode mode,
                                const AncillaState& ancilla) {
  if (!(ancilla.p0 >= 0.0 && ancilla.p0 <= 1.0) ||
      std::norm(ancilla.coherence) > ancilla.p0 * (1.0 - ancilla.p0) + 1e-12) {
    throw PreconditionError("ancilla state is not a valid density matrix");
  }
  auto forward = traverse_sequence(psi, geom, kicks, {TraversalOrder::Forward});
  if (mode == SwitchMode::Sequential) {
    auto copy = forward;
    return JointState{std::move(forward), std::move(copy), 1.0, 0.0, {0.0, 0.0}, false};
  }
  auto reverse = traverse_sequence(psi, geom, kicks, {TraversalOrder::Reverse});

  switch (mode) {
    case SwitchMode::QuantumSwitch:
      if (!ancilla.is_pure() || ancilla.p0 <= 0.0 || ancilla.p0 >= 1.0) {
        throw PreconditionError(
            "quantum switch needs a pure ancilla in superposition, e.g. (|0>+|1>)/sqrt(2)");
      }
      return JointState{std::move(forward), std::move(reverse), ancilla.p0,
                        1.0 - ancilla.p0, ancilla.coherence, false};
    case SwitchMode::ClassicalSwitch:
    case SwitchMode::ProbeAloneMixture:
      if (std::abs(ancilla.coherence) > 1e-12) {
        throw PreconditionError(
            "classical switch needs a diagonal ancilla, e.g. (|0><0|+|1><1|)/2");
      }
      return JointState{std::move(forward), std::move(reverse), ancilla.p0, 1.0 - ancilla.p0,
                        {0.0, 0.0}, mode == SwitchMode::ProbeAloneMixture};
    case SwitchMode::Sequential:
      break;
  }
  throw PreconditionError("unsupported switch mode");
}

}  // namespace cosense
