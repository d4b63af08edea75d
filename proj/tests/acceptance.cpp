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

// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cosense/commands.hpp"
#include "cosense/config.hpp"
#include "cosense/cv_core.hpp"
#include "cosense/errors.hpp"
#include "cosense/experiment.hpp"
#include "cosense/fisher.hpp"
#include "cosense/network.hpp"
#include "cosense/wva.hpp"

using namespace cosense;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt(const char* f, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

std::string fmt(const char* f, double a, double b, double c) {
  char buf[200];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

ProbeSpec lab_probe() { return ProbeSpec::from_wavelength(2e-3, 780e-9); }
constexpr double kZBar = 0.2;
constexpr double kZIn = 0.325;

// Oracle checks are shared by criteria 3, 4 and 10.
const std::vector<OracleCheck>& oracle_checks() {
  static const std::vector<OracleCheck> checks = [] {
    RunConfig c;  // 2^14 points, 20 seeds, 10 QFIM instances
    return run_oracle_checks(c, 0);
  }();
  return checks;
}

Outcome worst_of(const std::string& prefix, const std::string& what) {
  double worst = 0.0;
  int count = 0, failed = 0;
  for (const auto& ch : oracle_checks()) {
    if (ch.name.rfind(prefix, 0) != 0) continue;
    ++count;
    if (!ch.pass) ++failed;
    if (!ch.error.empty()) return {false, ch.name + " threw: " + ch.error};
    worst = std::max(worst, ch.rel_error);
  }
  Outcome o;
  o.pass = count > 0 && failed == 0;
  o.detail = std::to_string(count) + (what.empty() ? "" : " " + what) + ", worst " +
             fmt("%.3e", worst);
  return o;
}

double scaled_ratio(SwitchMode mode, const ProbeSpec& probe, double zb, int n) {
  const auto gm = GeneratorMoments::gaussian(probe, zb, n);
  return qcrb_for_mode(mode, gm).scaled_bound() / switch_scaling_limit(gm);
}

Outcome super_heisenberg_scaling() {
  const auto probe = lab_probe();
  const double q = scaled_ratio(SwitchMode::QuantumSwitch, probe, kZBar, 200);
  const double c = scaled_ratio(SwitchMode::ClassicalSwitch, probe, kZBar, 200);
  int first = -1;
  for (int n = 200; n <= 100000 && first < 0; ++n) {
    if (std::abs(scaled_ratio(SwitchMode::QuantumSwitch, probe, kZBar, n) - 1.0) <= 0.01 &&
        std::abs(scaled_ratio(SwitchMode::ClassicalSwitch, probe, kZBar, n) - 1.0) <= 0.01) {
      first = n;
    }
  }
  const double toy = scaled_ratio(SwitchMode::QuantumSwitch, ProbeSpec{2.0, 1.0, 0.0, 0.0}, 1.0, 200);
  Outcome o;
  o.pass = std::abs(q - 1.0) <= 0.01 && std::abs(c - 1.0) <= 0.01;
  o.detail = fmt("N=200: qSW*N^4/limit = %.4f, cSW*N^4/limit = %.4f", q, c) +
             "; first N within 1%: " + std::to_string(first) +
             fmt("; dimensionless probe at N=200: %.4f", toy);
  return o;
}

Outcome heisenberg_fixed_order() {
  const auto probe = lab_probe();
  const double ref = qcrb_for_mode(SwitchMode::Sequential,
                                   GeneratorMoments::gaussian(probe, kZBar, 1)).bound;
  double worst = 0.0;
  for (int n = 1; n <= 100; ++n) {
    const double b = qcrb_for_mode(SwitchMode::Sequential,
                                   GeneratorMoments::gaussian(probe, kZBar, n)).bound;
    worst = std::max(worst, std::abs(b * n * n / ref - 1.0));
  }
  return {worst <= 1e-12, fmt("max relative spread of Seq*N^2 over N=1..100: %.2e", worst)};
}

Outcome probe_alone_identity() {
  double worst = 0.0;
  for (int n = 1; n <= 50; ++n) {
    const auto gm = GeneratorMoments::gaussian(lab_probe(), kZBar, n);
    const double pa = probe_alone_qfi_at_origin(gm).bound;
    const double cs = qcrb_for_mode(SwitchMode::ClassicalSwitch, gm).bound;
    worst = std::max(worst, std::abs(pa / cs - 1.0));
  }
  return {worst <= 1e-12, fmt("max relative difference over N=1..50: %.2e", worst)};
}

struct WvaRun {
  double mean_p = 0.0;
  double spread_p = 0.0;
  double guard_displacement = 0.0;
  double guard_kick = 0.0;
  bool guard_ok = false;
};

WvaRun wva_exact(int n, double theta_bar) {
  const auto probe = lab_probe();
  const auto geom = NetworkGeometry::uniform(n, kZBar, probe.wave_number, kZIn);
  const auto kicks = KickVector::uniform(n, theta_bar);
  const auto ps = PostSelection::from_weak_value_magnitude(7.0);
  const auto psi = make_gaussian(probe, Grid::for_probe(probe, geom.z_total()));
  const auto guard = wva_guard(moments(psi), geom, kicks, ps);
  const auto res = wva_final_probe(psi, geom, kicks, ps, WvaMethod::ExactGrid);
  const Moments m = moments(res.probe);
  return {m.mean_p, std::sqrt(m.var_p), guard.displacement_term, guard.kick_term, guard.ok()};
}

Outcome wva_readout() {
  const auto probe = lab_probe();
  const auto ps = PostSelection::from_weak_value_magnitude(7.0);
  const double theta = 0.1;  // 1/m
  Outcome o{true, ""};
  for (int n : {1, 3, 5}) {
    const auto run = wva_exact(n, theta);
    const auto geom = NetworkGeometry::uniform(n, kZBar, probe.wave_number, kZIn);
    const double predicted =
        predicted_mean_momentum(probe.delta_p() * probe.delta_p(), geom, theta, ps);
    const double ratio = run.mean_p / predicted;
    o.pass = o.pass && run.guard_ok && std::abs(ratio - 1.0) <= 0.01;
    o.detail += (o.detail.empty() ? "" : "; ") + std::string("N=") + std::to_string(n) +
                fmt(" grid/closed-form = %.6f (guard %.1e, %.1e)", ratio,
                    run.guard_displacement, run.guard_kick);
  }
  return o;
}

Outcome threshold_consistency() {
  // Linear response of the grid at small tilt, extrapolated to the threshold
  // tilt, compared with the spread of the final probe.
  const auto probe = lab_probe();
  const auto ps = PostSelection::from_weak_value_magnitude(7.0);
  const ReadoutModel rm;
  Outcome o{true, ""};
  std::string diag;
  for (int n : {1, 3, 5}) {
    const auto geom = NetworkGeometry::uniform(n, kZBar, probe.wave_number, kZIn);
    const double threshold = min_detectable_tilt(geom, probe, ps).theta_bar;
    const double small = 0.1;
    const auto run = wva_exact(n, small);
    const double ratio = run.mean_p / small * threshold / run.spread_p;
    o.pass = o.pass && std::abs(ratio - 1.0) <= 0.01;
    o.detail += (o.detail.empty() ? "" : "; ") + std::string("N=") + std::to_string(n) +
                fmt(" M/dM = %.5f", ratio);

    // Direct evaluation at the threshold tilt, far outside the first-order regime.
    const auto full = wva_exact(n, threshold);
    diag += (diag.empty() ? "" : ", ") + fmt("%.3f", full.mean_p / full.spread_p);
  }
  o.detail += fmt(" (expected eps*cot(eps) = %.5f)", ps.epsilon / std::tan(ps.epsilon)) +
              "; direct grid at threshold tilt (nonlinear): " + diag;
  return o;
}

Outcome experiment_reproduction() {
  const auto fit = fit_scaling_law(measured_scaling_points());
  const bool table_ok = std::abs(fit.a / 4.77e-9 - 1.0) <= 0.03 &&
                        std::abs(fit.b / 4.25 - 1.0) <= 0.05 && fit.r_squared >= 0.985;
  SweepConfig sc = SweepConfig::experiment_defaults();
  sc.noise.relative_jitter = 0.0;
  sc.replicates = 1;
  const auto rep = end_to_end_sweep(sc);
  const bool synth_ok = rep.has_scaling && std::abs(rep.scaling.r_squared - 1.0) <= 1e-12;
  return {table_ok && synth_ok,
          fmt("table fit a = %.4e rad, b = %.4f, R^2 = %.5f", fit.a, fit.b, fit.r_squared) +
              fmt("; zero-jitter synthetic R^2 = %.15f", rep.scaling.r_squared)};
}

Outcome waveplate_compensation_check() {
  std::mt19937_64 rng(20260101);
  std::uniform_real_distribution<double> pick(-kPi, kPi);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double d = pick(rng);
    worst = std::max(worst, max_difference_up_to_phase(
                                waveplate_composite(waveplate_compensation(d)), rotation_z(-d / 2)));
  }
  return {worst <= 1e-12, fmt("100 random offsets, worst element difference %.2e", worst)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool cli_outputs_deterministic(std::string& note) {
  const fs::path root = fs::temp_directory_path() / ("cosense_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(root);
  RunConfig cfg;
  cfg.replicates = 10;
  bool ok = true;
  using Cmd = int (*)(const CommandContext&);
  const std::vector<std::pair<std::string, Cmd>> cmds = {
      {"qcrb_sweep.csv", cmd_qcrb_sweep},
      {"snr_sweep.csv", cmd_reproduce_experiment},
      {"wva_sim.json", cmd_wva_sim}};
  for (const auto& [file, cmd] : cmds) {
    std::string first;
    for (unsigned threads : {1u, 3u}) {
      const fs::path out = root / (file + std::to_string(threads));
      if (cmd(CommandContext{cfg, out, threads, nullptr}) != kExitOk) {
        ok = false;
        note += file + " command failed; ";
        continue;
      }
      const std::string text = slurp(out / file);
      if (threads == 1) {
        first = text;
      } else if (text != first || text.empty()) {
        ok = false;
        note += file + " differs across runs; ";
      }
    }
  }
  fs::remove_all(root);
  return ok;
}

Outcome property_suites() {
  std::vector<std::string> failures;
  auto require = [&](bool cond, const std::string& what) {
    if (!cond) failures.push_back(what);
  };

  // Unitarity of every operator on random Gaussians.
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double norm_err = 0.0, parity_err = 0.0;
  for (int i = 0; i < 20; ++i) {
    const auto psi = make_gaussian(ProbeSpec{2.0 + u(rng), 1.0, 2.0 * u(rng), u(rng)},
                                   Grid(1 << 12, 80.0));
    norm_err = std::max(norm_err, std::abs(apply_kick(psi, u(rng)).norm_squared() - 1.0));
    norm_err = std::max(norm_err, std::abs(apply_displacement(psi, 3.0 * u(rng)).norm_squared() - 1.0));
    norm_err = std::max(norm_err, std::abs(apply_propagation(psi, 4.0 + 3.0 * u(rng), 1.0).norm_squared() - 1.0));
    norm_err = std::max(norm_err, std::abs(psi.to_momentum().norm_squared() - 1.0));
    parity_err = std::max(parity_err, phase_aligned_max_difference(psi, apply_parity(apply_parity(psi))));
  }
  require(norm_err <= 1e-10, fmt("normalization drift %.2e", norm_err));
  require(parity_err <= 1e-15, fmt("parity involution %.2e", parity_err));

  // PSD and convexity on the closed forms over a parameter sweep.
  bool psd = true, convex = true;
  for (int n = 1; n <= 50; ++n) {
    for (const auto& probe : {lab_probe(), ProbeSpec{2.0, 1.0, 0.0, 0.0}}) {
      const auto gm = GeneratorMoments::gaussian(probe, probe.wave_number == 1.0 ? 1.0 : kZBar, n);
      const Qfim2 cs = qfim_classical_switch(gm);
      const Qfim2 pa = qfim_probe_alone_at_origin(gm);
      psd = psd && qfim_sequential(gm).is_psd() && qfim_quantum_switch(gm).is_psd() &&
            cs.is_psd() && pa.is_psd();
      const Qfim2 d = cs - pa;
      convex = convex && 0.5 * (d.q11 + 2.0 * d.q12 + d.q22) >= -1e-10 * cs.trace();
    }
  }
  require(psd, "closed-form QFIM not PSD");
  require(convex, "probe-alone QFIM exceeds classical switch on the estimable direction");
  const auto numeric_psd = worst_of("qfim_", "numerical QFIM checks");
  require(numeric_psd.pass, "numerical QFIM checks: " + numeric_psd.detail);
  const auto convex_oracle = worst_of("qfim_convexity", "");
  require(convex_oracle.pass, "grid convexity check failed");

  // SNR strictly increasing in N and voltage.
  SweepConfig sc = SweepConfig::experiment_defaults();
  sc.noise.relative_jitter = 0.0;
  sc.replicates = 1;
  const auto rep = end_to_end_sweep(sc);
  const std::size_t nv = sc.voltages.size(), nn = sc.n_values.size();
  bool mono = true;
  for (std::size_t ni = 0; ni < nn; ++ni) {
    for (std::size_t vi = 0; vi < nv; ++vi) {
      const double s = rep.samples[ni * nv + vi].snr;
      if (vi + 1 < nv) mono = mono && s < rep.samples[ni * nv + vi + 1].snr;
      if (ni + 1 < nn) mono = mono && s < rep.samples[(ni + 1) * nv + vi].snr;
    }
  }
  require(mono, "SNR not monotone");

  std::string note;
  require(cli_outputs_deterministic(note), "CLI outputs: " + note);

  Outcome o;
  o.pass = failures.empty();
  if (o.pass) {
    o.detail = fmt("normalization %.1e, parity %.1e, QFIM PSD and convexity hold, ", norm_err,
                   parity_err) +
               "SNR monotone, CLI outputs reproducible";
  } else {
    for (const auto& f : failures) o.detail += (o.detail.empty() ? "" : "; ") + f;
  }
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {"super_heisenberg_switch_scaling", super_heisenberg_scaling},
      {"heisenberg_fixed_order", heisenberg_fixed_order},
      {"composite_evolution_oracle",
       [] { return worst_of("bch_", "grid traversals vs reduced form (1 - fidelity)"); }},
      {"qfim_finite_difference_oracle",
       [] {
         auto a = worst_of("qfim_sequential_", "instances");
         auto b = worst_of("qfim_quantum_switch_", "instances");
         auto c = worst_of("qfim_classical_switch_", "instances");
         return Outcome{a.pass && b.pass && c.pass,
                        "sequential: " + a.detail + "; quantum switch: " + b.detail +
                            "; classical switch: " + c.detail};
       }},
      {"probe_alone_equals_classical_switch", probe_alone_identity},
      {"wva_mean_momentum", wva_readout},
      {"threshold_signal_equals_spread", threshold_consistency},
      {"experiment_scaling_fit", experiment_reproduction},
      {"waveplate_compensation", waveplate_compensation_check},
      {"property_suites", property_suites},
  };

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("%s %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].name,
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
