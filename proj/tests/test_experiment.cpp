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

#include <cmath>

#include <gtest/gtest.h>

#include "cosense/errors.hpp"
#include "cosense/experiment.hpp"

using namespace cosense;

namespace {

ReadoutContext lab_context() {
  return ReadoutContext{ProbeSpec::from_wavelength(2e-3, 780e-9),
                        PostSelection::from_weak_value_magnitude(7.0), ReadoutModel{}};
}

SweepConfig quiet_sweep() {
  SweepConfig c = SweepConfig::experiment_defaults();
  c.noise.relative_jitter = 0.0;
  c.replicates = 3;
  return c;
}

}  // namespace

TEST(Drive, VoltageToTilt) {
  EXPECT_NEAR(voltage_to_beam_tilt(1.0), 2.2e-6, 1e-20);
  EXPECT_NEAR(voltage_to_beam_tilt(5e-3), 11e-9, 1e-22);
  EXPECT_NEAR(beam_tilt_to_voltage(voltage_to_beam_tilt(0.37)), 0.37, 1e-15);
  EXPECT_THROW(voltage_to_beam_tilt(-1.0), PreconditionError);
  SensorDriveModel bad;
  bad.chip_separation = 0.0;
  EXPECT_THROW(bad.validate(), ConfigError);
}

TEST(Snr, ScalesWithBracket) {
  auto ctx = lab_context();
  const double k = ctx.probe.wave_number;
  NoiseModel noise{1e-3, 0.0};
  // z_in = 0: N² + N gives 2 and 6 for N = 1, 2.
  const double s1 = snr_model(1, 1e-9, NetworkGeometry::uniform(1, 0.2, k), noise, ctx);
  const double s2 = snr_model(2, 1e-9, NetworkGeometry::uniform(2, 0.2, k), noise, ctx);
  EXPECT_NEAR(s2 / s1, 3.0, 1e-12);
  EXPECT_THROW(snr_model(2, 1e-9, NetworkGeometry::uniform(1, 0.2, k), noise, ctx),
               PreconditionError);
  EXPECT_THROW(snr_model(1, 1e-9, NetworkGeometry::uniform(1, 0.2, k), NoiseModel{0.0, 0.0}, ctx),
               ConfigError);
}

TEST(Snr, CalibrationPutsUnitSnrAtReference) {
  auto ctx = lab_context();
  auto geom = NetworkGeometry::uniform(1, 0.2, ctx.probe.wave_number, 0.325);
  const double floor = calibrate_noise_floor(841.8e-12, geom, ctx);
  EXPECT_NEAR(snr_model(1, 841.8e-12, geom, NoiseModel{floor, 0.0}, ctx), 1.0, 1e-12);
}

TEST(SnrFit, RecoversSlopeThroughOrigin) {
  std::vector<SnrSample> s;
  for (int i = 1; i <= 10; ++i) s.push_back({4, i * 1e-3, 250.0 * i * 1e-3, 0});
  auto fit = fit_snr_vs_voltage(s);
  EXPECT_NEAR(fit.slope, 250.0, 1e-10);
  EXPECT_DOUBLE_EQ(fit.intercept, 0.0);
  EXPECT_NEAR(fit.min_voltage, 4e-3, 1e-15);
  EXPECT_NEAR(fit.min_tilt, 4e-3 * 2.2e-6, 1e-20);
  EXPECT_NEAR(fit.r_squared, 1.0, 1e-12);
}

TEST(SnrFit, FreeIntercept) {
  std::vector<SnrSample> s;
  for (int i = 1; i <= 10; ++i) s.push_back({1, i * 1e-3, 0.2 + 100.0 * i * 1e-3, 0});
  auto fit = fit_snr_vs_voltage(s, true);
  EXPECT_NEAR(fit.slope, 100.0, 1e-9);
  EXPECT_NEAR(fit.intercept, 0.2, 1e-12);
  EXPECT_NEAR(fit.min_voltage, 8e-3, 1e-14);
}

TEST(SnrFit, Errors) {
  EXPECT_THROW(fit_snr_vs_voltage({}), FitError);
  EXPECT_THROW(fit_snr_vs_voltage({{1, 1e-3, 1.0, 0}, {1, 1e-3, 1.1, 1}}), FitError);
  EXPECT_THROW(fit_snr_vs_voltage({{1, 1e-3, 1.0, 0}, {2, 2e-3, 2.0, 0}}), FitError);
  EXPECT_THROW(fit_snr_vs_voltage({{1, 1e-3, 0.0, 0}, {1, 2e-3, 0.0, 0}}), FitError);
}

TEST(ScalingFit, RecoversSyntheticLaw) {
  std::vector<ScalingPoint> pts;
  for (int n = 1; n <= 9; ++n) pts.push_back({n, 5.0 / (n * n + 3.0 * n)});
  auto fit = fit_scaling_law(pts);
  EXPECT_NEAR(fit.a, 5.0, 1e-10);
  EXPECT_NEAR(fit.b, 3.0, 1e-10);
  EXPECT_NEAR(fit.r_squared, 1.0, 1e-12);
  EXPECT_NEAR(fit.curve(2.0), 0.5, 1e-12);
  EXPECT_NEAR(fit.heisenberg_curve(2.0), 5.0 / 7.0, 1e-10);
}

TEST(ScalingFit, MeasuredTable) {
  auto fit = fit_scaling_law(measured_scaling_points());
  EXPECT_NEAR(fit.a, 4.7586e-9, 1e-12);
  EXPECT_NEAR(fit.b, 4.2306, 1e-3);
  EXPECT_NEAR(fit.r_squared, 0.99141, 1e-4);
  EXPECT_NEAR(fit.a / 4.77e-9, 1.0, 0.03);
  EXPECT_NEAR(fit.b / 4.25, 1.0, 0.05);
  EXPECT_EQ(measured_precision_dataset().size(), 9u);
  // Voltages and tilts agree through the drive model; the N = 6 row is off by 0.5%.
  for (const auto& m : measured_precision_dataset()) {
    EXPECT_NEAR(voltage_to_beam_tilt(m.min_voltage) / m.min_tilt, 1.0, 1e-2) << m.n_sensors;
  }
}

TEST(ScalingFit, Errors) {
  EXPECT_THROW(fit_scaling_law({{1, 1.0}, {2, 0.5}}), FitError);
  EXPECT_THROW(fit_scaling_law({{1, 1.0}, {2, 0.5}, {3, -0.1}}), FitError);
  EXPECT_THROW(fit_scaling_law({{0, 1.0}, {2, 0.5}, {3, 0.1}}), FitError);
}

TEST(Sweep, ZeroJitterRecoversForwardModel) {
  auto rep = end_to_end_sweep(quiet_sweep());
  ASSERT_TRUE(rep.has_scaling);
  EXPECT_NEAR(rep.scaling.r_squared, 1.0, 1e-12);
  EXPECT_NEAR(rep.scaling.b, 1.0 + 2.0 * 0.325 / 0.2, 1e-9);
  EXPECT_NEAR(rep.scaling.a, 841.8e-12 * 5.25, 1e-20);
  EXPECT_NEAR(rep.fits.front().min_tilt, 841.8e-12, 1e-22);
  for (const auto& f : rep.fits) EXPECT_NEAR(f.r_squared, 1.0, 1e-12);
}

TEST(Sweep, Deterministic) {
  SweepConfig c = SweepConfig::experiment_defaults();
  c.replicates = 20;
  c.seed = 99;
  auto a = end_to_end_sweep(c);
  c.threads = 3;
  auto b = end_to_end_sweep(c);
  ASSERT_EQ(a.samples.size(), b.samples.size());
  for (std::size_t i = 0; i < a.samples.size(); ++i) EXPECT_EQ(a.samples[i].snr, b.samples[i].snr);
  EXPECT_EQ(a.scaling.a, b.scaling.a);
  c.seed = 100;
  auto other = end_to_end_sweep(c);
  EXPECT_NE(other.samples[0].snr, a.samples[0].snr);
}

TEST(Sweep, NoiseIsIndependentOfN) {
  SweepConfig c = SweepConfig::experiment_defaults();
  c.replicates = 5;
  auto rep = end_to_end_sweep(c);
  auto clean = end_to_end_sweep(quiet_sweep());
  const std::size_t per_n = c.voltages.size() * 5;
  // Jitter factor for (voltage, replicate) is the same for every N.
  for (std::size_t i = 0; i < per_n; ++i) {
    const std::size_t ci = (i / 5) * 3;
    const double f1 = clean.samples[ci].snr / rep.samples[i].snr;
    const double f9 = clean.samples[8 * c.voltages.size() * 3 + ci].snr /
                      rep.samples[8 * per_n + i].snr;
    EXPECT_NEAR(f1 / f9, 1.0, 1e-12);
  }
}

TEST(Sweep, SnrMonotonicity) {
  auto rep = end_to_end_sweep(quiet_sweep());
  const std::size_t nv = 10, reps = 3;
  for (std::size_t ni = 0; ni < 9; ++ni) {
    for (std::size_t vi = 0; vi < nv; ++vi) {
      const double s = rep.samples[(ni * nv + vi) * reps].snr;
      if (vi + 1 < nv) EXPECT_LT(s, rep.samples[(ni * nv + vi + 1) * reps].snr);
      if (ni + 1 < 9) EXPECT_LT(s, rep.samples[((ni + 1) * nv + vi) * reps].snr);
    }
  }
}

TEST(Sweep, FewerThanThreeNSkipsScaling) {
  SweepConfig c = quiet_sweep();
  c.n_values = {1, 2};
  auto rep = end_to_end_sweep(c);
  EXPECT_FALSE(rep.has_scaling);
  EXPECT_EQ(rep.fits.size(), 2u);
}

TEST(Sweep, ValidationNamesField) {
  SweepConfig c = quiet_sweep();
  c.voltages = {1e-3};
  try {
    end_to_end_sweep(c);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("voltages"), std::string::npos);
  }
  c = quiet_sweep();
  c.replicates = 0;
  EXPECT_THROW(end_to_end_sweep(c), ConfigError);
}
