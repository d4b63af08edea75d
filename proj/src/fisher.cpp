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

#include "cosense/fisher.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include <Eigen/Eigenvalues>

#include "cosense/errors.hpp"

namespace cosense {
namespace {

using Vec = Eigen::VectorXcd;

Vec as_vector(const WaveFunction& psi) {
  const auto pos = psi.to_position();
  const auto a = pos.amplitudes();
  return Eigen::Map<const Vec>(a.data(), static_cast<Eigen::Index>(a.size()));
}

// ⟨a|b⟩ on the grid, dx folded in by the caller.
Complex dot(const Vec& a, const Vec& b) { return a.dot(b); }

struct Sample {
  Vec plus;
  Vec minus;
  double weight_plus = 1.0;
  double weight_minus = 0.0;
  Complex coherence{0.0, 0.0};
  bool traced = false;
  bool pure = true;
};

Sample sample(const JointStateBuilder& builder, double g1, double g2) {
  const JointState js = builder(g1, g2);
  js.validate(1e-10);
  const double sdx = std::sqrt(js.branch_plus.grid().dx());
  Sample s;
  s.plus = as_vector(js.branch_plus) * sdx;
  s.minus = as_vector(js.branch_minus) * sdx;
  s.weight_plus = js.weight_plus;
  s.weight_minus = js.weight_minus;
  s.coherence = js.coherence;
  s.traced = js.ancilla_traced;
  s.pure = js.is_pure(1e-10);
  return s;
}

// Branch derivatives d[b][j] by central differences with step h.
struct Derivs {
  std::array<std::array<Vec, 2>, 2> d;  // [branch][parameter]
};

Derivs central(const JointStateBuilder& builder, double g1, double g2, double h) {
  Derivs out;
  for (int j = 0; j < 2; ++j) {
    const double dg1 = j == 0 ? h : 0.0;
    const double dg2 = j == 1 ? h : 0.0;
    const Sample fwd = sample(builder, g1 + dg1, g2 + dg2);
    const Sample bwd = sample(builder, g1 - dg1, g2 - dg2);
    out.d[0][j] = (fwd.plus - bwd.plus) / (2.0 * h);
    out.d[1][j] = (fwd.minus - bwd.minus) / (2.0 * h);
  }
  return out;
}

Derivs richardson(const Derivs& coarse, const Derivs& fine) {
  Derivs out;
  for (int b = 0; b < 2; ++b) {
    for (int j = 0; j < 2; ++j) out.d[b][j] = (4.0 * fine.d[b][j] - coarse.d[b][j]) / 3.0;
  }
  return out;
}

Qfim2 pure_qfim(const Vec& psi, const std::array<Vec, 2>& d) {
  double q[2][2];
  for (int j = 0; j < 2; ++j) {
    for (int l = 0; l < 2; ++l) {
      const Complex term = dot(d[j], d[l]) - std::conj(dot(psi, d[j])) * dot(psi, d[l]);
      q[j][l] = 4.0 * term.real();
    }
  }
  return {q[0][0], 0.5 * (q[0][1] + q[1][0]), q[1][1]};
}

Qfim2 joint_pure_qfim(const Sample& s, const Derivs& dv) {
  const double p[2] = {s.weight_plus, s.weight_minus};
  const Vec* psi[2] = {&s.plus, &s.minus};
  double q[2][2];
  for (int j = 0; j < 2; ++j) {
    for (int l = 0; l < 2; ++l) {
      Complex dd{0.0, 0.0};
      Complex pj{0.0, 0.0};
      Complex pl{0.0, 0.0};
      for (int b = 0; b < 2; ++b) {
        if (p[b] == 0.0) continue;
        dd += p[b] * dot(dv.d[b][j], dv.d[b][l]);
        pj += p[b] * dot(*psi[b], dv.d[b][j]);
        pl += p[b] * dot(*psi[b], dv.d[b][l]);
      }
      q[j][l] = 4.0 * (dd - std::conj(pj) * pl).real();
    }
  }
  return {q[0][0], 0.5 * (q[0][1] + q[1][0]), q[1][1]};
}

Qfim2 labelled_mixture_qfim(const Sample& s, const Derivs& dv) {
  Qfim2 q;
  if (s.weight_plus > 0.0) q = q + pure_qfim(s.plus, dv.d[0]) * s.weight_plus;
  if (s.weight_minus > 0.0) q = q + pure_qfim(s.minus, dv.d[1]) * s.weight_minus;
  return q;
}

// Spectral QFIM of ρ = p₊|ψ₊⟩⟨ψ₊| + p₋|ψ₋⟩⟨ψ₋| restricted to its support,
// plus the support/kernel cross terms.
Qfim2 traced_mixture_qfim(const Sample& s, const Derivs& dv, double rank_tolerance) {
  const double p[2] = {s.weight_plus, s.weight_minus};
  const Vec* psi[2] = {&s.plus, &s.minus};

  std::vector<Vec> basis{s.plus};
  const Complex c = dot(s.plus, s.minus);
  Vec residual = s.minus - c * s.plus;
  const double rnorm = residual.norm();
  if (rnorm > 1e-9) basis.push_back(residual / rnorm);

  const auto r = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(r, r);
  for (int b = 0; b < 2; ++b) {
    Eigen::VectorXcd coords(r);
    for (Eigen::Index i = 0; i < r; ++i) coords(i) = dot(basis[static_cast<std::size_t>(i)], *psi[b]);
    rho += p[b] * coords * coords.adjoint();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho);

  std::vector<double> lam;
  std::vector<Vec> e;
  for (Eigen::Index m = 0; m < r; ++m) {
    if (es.eigenvalues()(m) <= rank_tolerance) continue;
    Vec v = Vec::Zero(s.plus.size());
    for (Eigen::Index i = 0; i < r; ++i) v += es.eigenvectors()(i, m) * basis[static_cast<std::size_t>(i)];
    lam.push_back(es.eigenvalues()(m));
    e.push_back(std::move(v));
  }

  // u[j][m] = ∂_jρ |e_m⟩
  const std::size_t rank = lam.size();
  std::array<std::vector<Vec>, 2> u;
  for (int j = 0; j < 2; ++j) {
    for (std::size_t m = 0; m < rank; ++m) {
      Vec acc = Vec::Zero(s.plus.size());
      for (int b = 0; b < 2; ++b) {
        if (p[b] == 0.0) continue;
        acc += p[b] * (dv.d[b][j] * dot(*psi[b], e[m]) + *psi[b] * dot(dv.d[b][j], e[m]));
      }
      u[static_cast<std::size_t>(j)].push_back(std::move(acc));
    }
  }

  double q[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
  for (int j = 0; j < 2; ++j) {
    for (int l = 0; l < 2; ++l) {
      const auto& uj = u[static_cast<std::size_t>(j)];
      const auto& ul = u[static_cast<std::size_t>(l)];
      double acc = 0.0;
      for (std::size_t m = 0; m < rank; ++m) {
        for (std::size_t n = 0; n < rank; ++n) {
          const Complex rj = dot(e[m], uj[n]);  // ⟨e_m|∂_jρ|e_n⟩
          const Complex rl = dot(e[n], ul[m]);  // ⟨e_n|∂_lρ|e_m⟩
          acc += 2.0 * (rj * rl).real() / (lam[m] + lam[n]);
        }
        Complex kernel = dot(uj[m], ul[m]);
        for (std::size_t n = 0; n < rank; ++n) {
          kernel -= dot(uj[m], e[n]) * dot(e[n], ul[m]);
        }
        acc += 4.0 / lam[m] * kernel.real();
      }
      q[j][l] = acc;
    }
  }
  return {q[0][0], 0.5 * (q[0][1] + q[1][0]), q[1][1]};
}

Qfim2 qfim_from(const Sample& s, const Derivs& dv, double rank_tolerance) {
  if (s.traced) return traced_mixture_qfim(s, dv, rank_tolerance);
  if (s.pure) return joint_pure_qfim(s, dv);
  if (std::abs(s.coherence) == 0.0) return labelled_mixture_qfim(s, dv);
  throw PreconditionError(
      "qfim_numerical: partially coherent ancilla states are not supported");
}

}  // namespace

Eigen::Matrix2d Qfim2::matrix() const {
  Eigen::Matrix2d m;
  m << q11, q12, q12, q22;
  return m;
}

std::array<double, 2> Qfim2::eigenvalues() const {
  const double mean = 0.5 * (q11 + q22);
  const double half = 0.5 * (q11 - q22);
  const double r = std::hypot(half, q12);
  return {mean - r, mean + r};
}

bool Qfim2::is_psd(double relative_tolerance) const {
  const auto ev = eigenvalues();
  return ev[0] >= -relative_tolerance * std::abs(trace());
}

double relative_frobenius_error(const Qfim2& a, const Qfim2& ref) {
  const double denom = ref.matrix().norm();
  if (denom == 0.0) return (a.matrix() - ref.matrix()).norm();
  return (a.matrix() - ref.matrix()).norm() / denom;
}

GeneratorMoments GeneratorMoments::from(const Moments& m, double wave_number, double z_bar,
                                        int n_sensors, double g1, double g2) {
  GeneratorMoments gm;
  gm.var_x = m.var_x;
  gm.var_p = m.var_p;
  gm.cov_xp = m.cov_xp;
  gm.mean_p = m.mean_p;
  gm.g1 = g1;
  gm.g2 = g2;
  gm.wave_number = wave_number;
  gm.z_bar = z_bar;
  gm.n_sensors = n_sensors;
  gm.validate();
  return gm;
}

GeneratorMoments GeneratorMoments::gaussian(const ProbeSpec& probe, double z_bar,
                                            int n_sensors) {
  probe.validate();
  Moments m;
  m.mean_x = probe.center_x;
  m.mean_p = probe.center_p;
  m.var_x = probe.delta_x() * probe.delta_x();
  m.var_p = probe.delta_p() * probe.delta_p();
  m.cov_xp = 0.0;
  return from(m, probe.wave_number, z_bar, n_sensors);
}

void GeneratorMoments::validate() const {
  if (!(var_x > 0.0) || !(var_p > 0.0)) {
    throw PreconditionError("generator moments need positive variances");
  }
  if (!(wave_number > 0.0) || !(z_bar > 0.0)) {
    throw PreconditionError("generator moments need k > 0 and z_bar > 0");
  }
  if (n_sensors < 1) throw PreconditionError("generator moments need N >= 1");
}

double QcrbReport::scaled_bound() const {
  const double n = n_sensors;
  return bound * n * n * n * n;
}

double QcrbReport::precision() const { return std::sqrt(trials * bound); }

Qfim2 qfim_sequential(const GeneratorMoments& gm) {
  gm.validate();
  const double d = gm.loop_length();
  const double k = gm.wave_number;
  const double a = gm.var_x / (d * d);
  const double c = gm.cov_xp / (d * k);
  const double p = gm.var_p / (k * k);
  return Qfim2{a + p + 2.0 * c, a + c, a} * 4.0;
}

Qfim2 qfim_sequential_reverse(const GeneratorMoments& gm) {
  const Qfim2 q = qfim_sequential(gm);
  return {q.q22, q.q12, q.q11};
}

Qfim2 qfim_quantum_switch(const GeneratorMoments& gm, double forward_weight) {
  gm.validate();
  const double p = forward_weight;
  if (!(p >= 0.0 && p <= 1.0)) {
    throw PreconditionError("qfim_quantum_switch: forward weight must lie in [0, 1]");
  }
  // ℋ₁ = u + Π₀v, ℋ₂ = u + Π₁w with u = X/D', v = P/k − g₂/(kD'),
  // w = P/k − g₁/(kD'), Π₀ = |0⟩⟨0| carrying weight p.
  const double d = gm.loop_length();
  const double k = gm.wave_number;
  const double var_u = gm.var_x / (d * d);
  const double cov_uv = gm.cov_xp / (d * k);
  const double var_v = gm.var_p / (k * k);
  const double mean_v = gm.mean_p / k - gm.g2 / (k * d);
  const double mean_w = gm.mean_p / k - gm.g1 / (k * d);
  const double q = 1.0 - p;
  const double var1 = var_u + 2.0 * p * cov_uv + p * var_v + p * q * mean_v * mean_v;
  const double var2 = var_u + 2.0 * q * cov_uv + q * var_v + p * q * mean_w * mean_w;
  const double cov12 = var_u + q * cov_uv + p * cov_uv - p * q * mean_v * mean_w;
  return Qfim2{var1, cov12, var2} * 4.0;
}

Qfim2 qfim_classical_switch(const GeneratorMoments& gm) {
  return (qfim_sequential(gm) + qfim_sequential_reverse(gm)) * 0.5;
}

Qfim2 qfim_probe_alone_at_origin(const GeneratorMoments& gm) {
  gm.validate();
  const double d = gm.loop_length();
  const double k = gm.wave_number;
  const double var_h0 = gm.var_p / (k * k) + 4.0 * gm.var_x / (d * d) + 4.0 * gm.cov_xp / (k * d);
  return {var_h0, var_h0, var_h0};
}

QcrbReport qcrb_global(const Qfim2& q, int n_sensors, double z_bar, int trials,
                       SwitchMode strategy) {
  if (n_sensors < 1 || !(z_bar > 0.0)) {
    throw PreconditionError("qcrb_global: need N >= 1 and z_bar > 0");
  }
  if (trials < 1) throw PreconditionError("qcrb_global: trials must be >= 1");
  if (!q.is_psd()) throw PreconditionError("qcrb_global: QFIM is not positive semidefinite");

  const double gscale = 1.0 / (n_sensors * (n_sensors + 1) * z_bar);
  Eigen::Vector2d g(gscale, gscale);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(q.matrix());
  const Eigen::Vector2d lam = es.eigenvalues();
  const double tol = 1e-10 * std::abs(q.trace());

  double bound = 0.0;
  if (lam(0) > tol) {
    bound = g.dot(q.matrix().inverse() * g);
  } else {
    if (!(lam(1) > tol)) throw NotEstimableError("QFIM vanishes; theta_bar is not estimable");
    const double null_part = g.dot(es.eigenvectors().col(0));
    if (std::abs(null_part) > 1e-8 * g.norm()) {
      std::ostringstream msg;
      msg << "QFIM is singular and the Jacobian has a component " << null_part
          << " along its null direction; theta_bar is not estimable";
      throw NotEstimableError(msg.str());
    }
    const double range_part = g.dot(es.eigenvectors().col(1));
    bound = range_part * range_part / lam(1);
  }
  return QcrbReport{strategy, n_sensors, bound, trials};
}

double qcrb_sequential_closed_form(const GeneratorMoments& gm) {
  gm.validate();
  const double n = gm.n_sensors;
  return 1.0 / (4.0 * n * n * (gm.var_x - gm.cov_xp * gm.cov_xp / gm.var_p));
}

double qcrb_quantum_switch_closed_form(const GeneratorMoments& gm) {
  const Qfim2 q = qfim_quantum_switch(gm) * 0.25;  // (Var ℋ₁, Cov, Var ℋ₂)
  const double n = gm.n_sensors;
  const double d = gm.loop_length();
  return (q.q11 + q.q22 - 2.0 * q.q12) / (4.0 * n * n * d * d * q.determinant());
}

double qcrb_classical_switch_closed_form(const GeneratorMoments& gm) {
  gm.validate();
  const double n = gm.n_sensors;
  const double k = gm.wave_number;
  const double d = gm.loop_length();
  return k * k / (n * n * d * d * gm.var_p + 4.0 * n * n * d * k * gm.cov_xp +
                  4.0 * n * n * k * k * gm.var_x);
}

QcrbReport probe_alone_qfi_at_origin(const GeneratorMoments& gm, int trials) {
  const double var_h0 = qfim_probe_alone_at_origin(gm).q11;
  const double n = gm.n_sensors;
  const double d = gm.loop_length();
  return QcrbReport{SwitchMode::ProbeAloneMixture, gm.n_sensors, 1.0 / (n * n * d * d * var_h0),
                    trials};
}

QcrbReport qcrb_for_mode(SwitchMode mode, const GeneratorMoments& gm, int trials) {
  switch (mode) {
    case SwitchMode::Sequential:
      return qcrb_global(qfim_sequential(gm), gm.n_sensors, gm.z_bar, trials, mode);
    case SwitchMode::QuantumSwitch:
      return qcrb_global(qfim_quantum_switch(gm), gm.n_sensors, gm.z_bar, trials, mode);
    case SwitchMode::ClassicalSwitch:
      return qcrb_global(qfim_classical_switch(gm), gm.n_sensors, gm.z_bar, trials, mode);
    case SwitchMode::ProbeAloneMixture:
      return probe_alone_qfi_at_origin(gm, trials);
  }
  throw PreconditionError("qcrb_for_mode: unknown mode");
}

double switch_scaling_limit(const GeneratorMoments& gm) {
  gm.validate();
  const double k = gm.wave_number;
  return k * k / (gm.z_bar * gm.z_bar * gm.var_p);
}

JointStateBuilder analytic_joint_state_builder(const WaveFunction& psi, double wave_number,
                                               double z_bar, int n_sensors, SwitchMode mode,
                                               double forward_weight) {
  require_normalized(psi);
  if (!(forward_weight > 0.0 && forward_weight < 1.0) && mode != SwitchMode::Sequential) {
    throw PreconditionError("analytic_joint_state_builder: forward weight must be in (0, 1)");
  }
  const WaveFunction start = psi.to_position();
  return [start, wave_number, z_bar, n_sensors, mode, forward_weight](double g1, double g2) {
    CompositeEvolution comp;
    comp.g1 = g1;
    comp.g2 = g2;
    comp.n_sensors = n_sensors;
    comp.z_bar = z_bar;
    const bool phased = mode == SwitchMode::QuantumSwitch;
    auto plus = apply_composite(start, comp, wave_number, TraversalOrder::Forward, phased);
    if (mode == SwitchMode::Sequential) {
      auto copy = plus;
      return JointState{std::move(plus), std::move(copy), 1.0, 0.0, {0.0, 0.0}, false};
    }
    auto minus = apply_composite(start, comp, wave_number, TraversalOrder::Reverse, phased);
    const double p = forward_weight;
    const Complex coherence =
        phased ? Complex{std::sqrt(p * (1.0 - p)), 0.0} : Complex{0.0, 0.0};
    return JointState{std::move(plus), std::move(minus), p, 1.0 - p, coherence,
                      mode == SwitchMode::ProbeAloneMixture};
  };
}

double natural_g_scale(const Moments& m, double wave_number, double loop_length) {
  return 1.0 / (std::sqrt(m.var_x) / loop_length + std::sqrt(m.var_p) / wave_number);
}

Qfim2 qfim_numerical(const JointStateBuilder& builder, double g1, double g2,
                     const NumericalQfimOptions& options) {
  if (!(options.relative_step > 0.0) || !(options.scale > 0.0)) {
    throw PreconditionError("qfim_numerical: step and scale must be positive");
  }
  const double h = options.relative_step * std::max({std::abs(g1), std::abs(g2), options.scale});
  const Sample centre = sample(builder, g1, g2);
  const Derivs coarse = central(builder, g1, g2, h);
  const Derivs fine = central(builder, g1, g2, 0.5 * h);
  const Qfim2 q_fine = qfim_from(centre, fine, options.rank_tolerance);
  const Qfim2 q_rich = qfim_from(centre, richardson(coarse, fine), options.rank_tolerance);

  const double disagreement = relative_frobenius_error(q_fine, q_rich);
  if (!(disagreement <= options.richardson_tolerance)) {
    std::ostringstream msg;
    msg << "finite-difference QFIM did not converge: step-halved and Richardson estimates"
        << " differ by " << disagreement << " (tolerance " << options.richardson_tolerance
        << ")";
    throw NumericalQualityError(msg.str());
  }
  return q_rich;
}

}  // namespace cosense
