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

#include "cosense/cv_core.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <sstream>

#include "cosense/errors.hpp"
#include "fft.hpp"

namespace cosense {

Grid::Grid(std::size_t num_points, double half_extent)
    : n_(num_points), half_extent_(half_extent) {
  if (num_points < 4 || !std::has_single_bit(num_points)) {
    std::ostringstream msg;
    msg << "grid.num_points must be a power of two >= 4, got " << num_points;
    throw ConfigError(msg.str());
  }
  if (!(half_extent > 0.0) || !std::isfinite(half_extent)) {
    std::ostringstream msg;
    msg << "grid.half_extent must be positive and finite, got " << half_extent;
    throw ConfigError(msg.str());
  }
}

Grid Grid::for_probe(const ProbeSpec& probe, double z_total, std::size_t num_points) {
  probe.validate();
  const double w_far = gaussian_radius(probe.waist_radius, z_total, probe.wave_number);
  return Grid(num_points, 8.0 * std::max(probe.waist_radius, w_far));
}

double Grid::dp() const { return 2.0 * std::numbers::pi / (static_cast<double>(n_) * dx()); }

double Grid::x(std::size_t j) const {
  return (static_cast<double>(j) - static_cast<double>(n_ / 2)) * dx();
}

double Grid::p(std::size_t m) const {
  const auto signed_m = m < n_ / 2 ? static_cast<double>(m)
                                   : static_cast<double>(m) - static_cast<double>(n_);
  return signed_m * dp();
}

double Grid::p_max() const { return static_cast<double>(n_ / 2) * dp(); }

WaveFunction::WaveFunction(Grid grid, ComplexVector amplitudes, Representation rep)
    : grid_(grid), amps_(std::move(amplitudes)), rep_(rep) {
  if (amps_.size() != grid_.size()) {
    throw PreconditionError("wavefunction length does not match grid size");
  }
}

WaveFunction WaveFunction::to_momentum() const {
  if (rep_ == Representation::Momentum) return *this;
  ComplexVector out = amps_;
  detail::fft_forward(out);
  // x_j = (j - n/2)dx contributes e^{iπm} = (-1)^m on top of the DFT kernel.
  const double scale = grid_.dx() / std::sqrt(2.0 * std::numbers::pi);
  for (std::size_t m = 0; m < out.size(); ++m) {
    out[m] *= (m % 2 == 0) ? scale : -scale;
  }
  return WaveFunction(grid_, std::move(out), Representation::Momentum);
}

WaveFunction WaveFunction::to_position() const {
  if (rep_ == Representation::Position) return *this;
  ComplexVector out = amps_;
  for (std::size_t m = 0; m < out.size(); ++m) {
    if (m % 2 == 1) out[m] = -out[m];
  }
  detail::fft_backward(out);
  const double scale = std::sqrt(2.0 * std::numbers::pi) /
                       (static_cast<double>(grid_.size()) * grid_.dx());
  for (auto& a : out) a *= scale;
  return WaveFunction(grid_, std::move(out), Representation::Position);
}

double WaveFunction::norm_squared() const {
  double sum = 0.0;
  for (const auto& a : amps_) sum += std::norm(a);
  return sum * (rep_ == Representation::Position ? grid_.dx() : grid_.dp());
}

WaveFunction WaveFunction::normalized() const {
  const double n2 = norm_squared();
  if (!(n2 > 0.0)) throw PreconditionError("cannot normalize a zero wavefunction");
  return scaled(1.0 / std::sqrt(n2));
}

WaveFunction WaveFunction::scaled(Complex factor) const {
  ComplexVector out = amps_;
  for (auto& a : out) a *= factor;
  return WaveFunction(grid_, std::move(out), rep_);
}

ProbeSpec ProbeSpec::from_wavelength(double waist_radius, double wavelength) {
  if (!(wavelength > 0.0)) throw ConfigError("probe.wavelength must be positive");
  return ProbeSpec{waist_radius, 2.0 * std::numbers::pi / wavelength, 0.0, 0.0};
}

void ProbeSpec::validate() const {
  if (!(waist_radius > 0.0) || !std::isfinite(waist_radius)) {
    throw ConfigError("probe.waist_radius must be positive");
  }
  if (!(wave_number > 0.0) || !std::isfinite(wave_number)) {
    throw ConfigError("probe.wave_number must be positive");
  }
}

double gaussian_radius(double waist_radius, double z, double wave_number) {
  const double ratio = 2.0 * z / (wave_number * waist_radius * waist_radius);
  return waist_radius * std::sqrt(1.0 + ratio * ratio);
}

WaveFunction make_gaussian(const ProbeSpec& spec, const Grid& grid) {
  spec.validate();
  if (grid.half_extent() < 4.0 * spec.waist_radius) {
    std::ostringstream msg;
    msg << "grid half extent " << grid.half_extent()
        << " m is smaller than 4 x waist radius (waist radius " << spec.waist_radius << " m)";
    throw ConfigError(msg.str());
  }
  ComplexVector amps(grid.size());
  const double w2 = spec.waist_radius * spec.waist_radius;
  for (std::size_t j = 0; j < amps.size(); ++j) {
    const double x = grid.x(j);
    const double u = x - spec.center_x;
    amps[j] = std::exp(-u * u / w2) * std::polar(1.0, spec.center_p * x);
  }
  return WaveFunction(grid, std::move(amps)).normalized();
}

void require_normalized(const WaveFunction& psi, double tolerance) {
  const double n2 = psi.norm_squared();
  if (std::abs(n2 - 1.0) > tolerance) {
    std::ostringstream msg;
    msg << "wavefunction is not normalized (norm^2 = " << n2 << ")";
    throw PreconditionError(msg.str());
  }
}

Moments moments(const WaveFunction& psi) {
  require_normalized(psi);
  const auto pos = psi.to_position();
  const auto mom = psi.to_momentum();
  const Grid& g = psi.grid();
  const auto a = pos.amplitudes();
  const auto b = mom.amplitudes();

  Moments m;
  for (std::size_t j = 0; j < a.size(); ++j) m.mean_x += g.x(j) * std::norm(a[j]);
  m.mean_x *= g.dx();
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double d = g.x(j) - m.mean_x;
    m.var_x += d * d * std::norm(a[j]);
  }
  m.var_x *= g.dx();

  for (std::size_t k = 0; k < b.size(); ++k) m.mean_p += g.p(k) * std::norm(b[k]);
  m.mean_p *= g.dp();
  for (std::size_t k = 0; k < b.size(); ++k) {
    const double d = g.p(k) - m.mean_p;
    m.var_p += d * d * std::norm(b[k]);
  }
  m.var_p *= g.dp();

  // Re⟨(X-⟨X⟩)ψ|(P-⟨P⟩)ψ⟩ is the symmetrized covariance.
  ComplexVector p_psi(b.begin(), b.end());
  for (std::size_t k = 0; k < p_psi.size(); ++k) p_psi[k] *= g.p(k) - m.mean_p;
  const auto p_pos =
      WaveFunction(g, std::move(p_psi), Representation::Momentum).to_position();
  const auto pa = p_pos.amplitudes();
  double cov = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    cov += (g.x(j) - m.mean_x) * std::real(std::conj(a[j]) * pa[j]);
  }
  m.cov_xp = cov * g.dx();
  return m;
}

Complex overlap(const WaveFunction& a, const WaveFunction& b) {
  if (!(a.grid() == b.grid())) throw PreconditionError("overlap: grid mismatch");
  const auto pa = a.to_position();
  const auto pb = b.to_position();
  const auto x = pa.amplitudes();
  const auto y = pb.amplitudes();
  Complex sum{0.0, 0.0};
  for (std::size_t j = 0; j < x.size(); ++j) sum += std::conj(x[j]) * y[j];
  return sum * a.grid().dx();
}

double fidelity(const WaveFunction& a, const WaveFunction& b) {
  if (!(a.grid() == b.grid())) throw PreconditionError("fidelity: grid mismatch");
  require_normalized(a);
  require_normalized(b);
  return std::min(1.0, std::norm(overlap(a, b)));
}

double phase_aligned_max_difference(const WaveFunction& a, const WaveFunction& b) {
  const Complex ov = overlap(b, a);
  const Complex phase = std::abs(ov) > 0.0 ? ov / std::abs(ov) : Complex{1.0, 0.0};
  const auto pa = a.to_position();
  const auto pb = b.to_position();
  double worst = 0.0;
  for (std::size_t j = 0; j < pa.size(); ++j) {
    worst = std::max(worst, std::abs(pa.amplitudes()[j] - phase * pb.amplitudes()[j]));
  }
  return worst;
}

}  // namespace cosense
