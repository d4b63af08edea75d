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

#include <cstdint>
#include <vector>

#include "cosense/cv_core.hpp"
#include "cosense/network.hpp"
#include "cosense/wva.hpp"

namespace cosense {

/// Two PZT chips driven in antiphase behind each sensor mirror.
struct SensorDriveModel {
  double pzt_displacement_per_volt = 22e-9;  // m/V
  double chip_separation = 20e-3;            // m
  double beam_tilt_factor = 2.0;             // reflected beam turns twice the mirror

  /// Beam tilt per volt peak-to-peak: 2.2 µrad/V with the defaults.
  double beam_tilt_per_volt() const;
  void validate() const;
};

/// Beam-tilt modulation amplitude for a drive of v_pp volts peak-to-peak.
double voltage_to_beam_tilt(double v_pp, const SensorDriveModel& model = {});
double beam_tilt_to_voltage(double tilt, const SensorDriveModel& model = {});

struct NoiseModel {
  double noise_floor = 1e-3;     // V
  double relative_jitter = 0.0;  // log-normal σ on the floor, synthetic data only

  void validate() const;
};

/// Everything the SNR chain needs besides N and φ̄.
struct ReadoutContext {
  ProbeSpec probe;
  PostSelection post_selection;
  ReadoutModel readout;
};

struct SnrSample {
  int n_sensors = 1;
  double drive_voltage_pp = 0.0;
  double snr = 0.0;
  int replicate_index = 0;
};

/// V_Δ/V_noise for the QPD signal at average tilt φ̄.
double snr_model(int n_sensors, double phi_bar, const NetworkGeometry& geom,
                 const NoiseModel& noise, const ReadoutContext& ctx);

/// Noise floor making SNR = 1 at tilt φ̄ for the given network.
double calibrate_noise_floor(double phi_bar, const NetworkGeometry& geom,
                             const ReadoutContext& ctx);

struct SnrFit {
  int n_sensors = 0;
  double slope = 0.0;        // 1/V
  double intercept = 0.0;    // 0 unless fitted freely
  double min_voltage = 0.0;  // SNR = 1
  double min_tilt = 0.0;     // beam tilt at min_voltage
  double r_squared = 0.0;
};

/// Least-squares SNR = slope·v (+ intercept). Samples must share one N.
SnrFit fit_snr_vs_voltage(const std::vector<SnrSample>& samples, bool free_intercept = false,
                          const SensorDriveModel& drive = {});

struct ScalingPoint {
  int n_sensors = 0;
  double min_tilt = 0.0;
};

struct ScalingFit {
  double a = 0.0;
  double b = 0.0;
  double r_squared = 0.0;

  double curve(double n) const { return a / (n * n + b * n); }
  /// Same fit with the N² term replaced by 1.
  double heisenberg_curve(double n) const { return a / (1.0 + b * n); }
};

/// δφ̄_min = a/(N² + bN), solved linearly in 1/δφ̄ against (N², N);
/// R² is computed on δφ̄ itself.
ScalingFit fit_scaling_law(const std::vector<ScalingPoint>& points);

struct MeasuredPrecision {
  int n_sensors;
  double min_voltage;  // V
  double min_tilt;     // rad
};

/// Minimum detectable tilts measured for 1..9 sensors.
const std::vector<MeasuredPrecision>& measured_precision_dataset();
std::vector<ScalingPoint> measured_scaling_points();

struct SweepConfig {
  std::vector<int> n_values{1, 2, 3, 4, 5, 6, 7, 8, 9};
  std::vector<double> voltages;  // V pp; defaults to 1..10 mV
  int replicates = 100;
  double z_bar = 0.2;
  double lead_in = 0.325;
  double lead_out = 0.0;
  ReadoutContext context;
  SensorDriveModel drive;
  NoiseModel noise;           // noise_floor <= 0 means calibrate
  double calibration_tilt = 841.8e-12;  // SNR = 1 here for N = 1
  bool free_intercept = false;
  std::uint64_t seed = 1;
  unsigned threads = 1;

  static SweepConfig experiment_defaults();
  void validate() const;
};

struct SweepReport {
  std::vector<SnrSample> samples;  // ordered by (N, voltage, replicate)
  std::vector<SnrFit> fits;        // one per N
  ScalingFit scaling;  // set when at least three distinct N were swept
  bool has_scaling = false;
  double noise_floor = 0.0;
};

/// Synthetic SNR data from the readout chain, with per-(voltage, replicate)
/// seeded jitter so that every N sees the same noise draws.
SweepReport end_to_end_sweep(const SweepConfig& config);

}  // namespace cosense
