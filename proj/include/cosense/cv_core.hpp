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

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace cosense {

using Complex = std::complex<double>;
using ComplexVector = std::vector<Complex>;

struct ProbeSpec;

/// Uniform periodic 1-D grid centred on x = 0.
///
/// Sample j sits at x_j = (j - n/2)·dx, so x = 0 is a grid point and the
/// reflection x -> -x maps sample j onto (n - j) mod n. Momentum samples are
/// kept in FFT order: index m carries p = m·dp for m < n/2 and (m - n)·dp
/// otherwise, with dp = 2π/(n·dx).
class Grid {
 public:
  Grid(std::size_t num_points, double half_extent);

  /// Default simulation window for a probe that travels `z_total`:
  /// half extent 8·max(w0, w(z_total)).
  static Grid for_probe(const ProbeSpec& probe, double z_total,
                        std::size_t num_points = std::size_t{1} << 14);

  std::size_t size() const { return n_; }
  double half_extent() const { return half_extent_; }
  double dx() const { return 2.0 * half_extent_ / static_cast<double>(n_); }
  double dp() const;
  double x(std::size_t j) const;
  double p(std::size_t m) const;
  double p_max() const;
  std::size_t mirror_index(std::size_t j) const { return (n_ - j) % n_; }

  bool operator==(const Grid&) const = default;

 private:
  std::size_t n_;
  double half_extent_;
};

enum class Representation { Position, Momentum };

/// Sampled transverse-mode amplitudes.
///
/// Position amplitudes are ψ(x_j); momentum amplitudes are samples of the
/// unitary continuous transform ψ̃(p) = (2π)^{-1/2} ∫ψ(x) e^{-ipx} dx, so
/// Σ|ψ|²dx = Σ|ψ̃|²dp for either tag.
class WaveFunction {
 public:
  WaveFunction(Grid grid, ComplexVector amplitudes,
               Representation rep = Representation::Position);

  const Grid& grid() const { return grid_; }
  Representation representation() const { return rep_; }
  std::span<const Complex> amplitudes() const { return amps_; }
  std::size_t size() const { return amps_.size(); }

  WaveFunction to_position() const;
  WaveFunction to_momentum() const;

  /// Σ|a|²·(dx or dp), depending on the representation tag.
  double norm_squared() const;
  WaveFunction normalized() const;
  WaveFunction scaled(Complex factor) const;

 private:
  Grid grid_;
  ComplexVector amps_;
  Representation rep_;
};

struct ProbeSpec {
  double waist_radius = 0.0;  // w0 [m]
  double wave_number = 0.0;   // k = 2π/λ [1/m]
  double center_x = 0.0;      // [m]
  double center_p = 0.0;      // [1/m]

  static ProbeSpec from_wavelength(double waist_radius, double wavelength);

  double delta_x() const { return waist_radius / 2.0; }
  double delta_p() const { return 1.0 / waist_radius; }
  void validate() const;
};

struct Moments {
  double mean_x = 0.0;
  double mean_p = 0.0;
  double var_x = 0.0;
  double var_p = 0.0;
  double cov_xp = 0.0;  // ½⟨{X,P}⟩ - ⟨X⟩⟨P⟩

  /// var_x·var_p - cov_xp², bounded below by 1/4 for any state.
  double uncertainty_determinant() const { return var_x * var_p - cov_xp * cov_xp; }
};

/// Diffracted 1/e² field radius of a Gaussian waist w0 after distance z.
double gaussian_radius(double waist_radius, double z, double wave_number);

WaveFunction make_gaussian(const ProbeSpec& spec, const Grid& grid);

Moments moments(const WaveFunction& psi);

/// ⟨a|b⟩ by rectangle quadrature in position space.
Complex overlap(const WaveFunction& a, const WaveFunction& b);

/// |⟨a|b⟩|²; both states must be normalized and share a grid.
double fidelity(const WaveFunction& a, const WaveFunction& b);

/// max_j |a_j - e^{iφ} b_j| for the phase φ that aligns b with a.
double phase_aligned_max_difference(const WaveFunction& a, const WaveFunction& b);

/// Throws PreconditionError when |‖ψ‖² - 1| exceeds `tolerance`.
void require_normalized(const WaveFunction& psi, double tolerance = 1e-6);

}  // namespace cosense
