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
#include <filesystem>
#include <string>
#include <vector>

#include "cosense/experiment.hpp"
#include "cosense/network.hpp"
#include "cosense/wva.hpp"

namespace cosense {

/// Everything a CLI run needs. Serialized as JSON; see README for the schema.
struct RunConfig {
  // probe
  double waist_radius = 2e-3;
  double wavelength = 780e-9;
  double center_x = 0.0;
  double center_p = 0.0;

  // geometry
  double z_bar = 0.2;
  double z_in = 0.325;
  double z_out = 0.0;
  std::vector<double> distances;  // explicit z_0..z_N for wva-sim; empty = uniform

  // strategies and bounds
  std::vector<SwitchMode> modes = all_switch_modes();
  int n_min = 1;
  int n_max = 50;
  int trials = 1;

  // post-selection
  double weak_value = 7.0;  // |A_w|; ignored when epsilon > 0
  double epsilon = 0.0;
  WeakValueKind weak_value_kind = WeakValueKind::Imaginary;

  // grid
  int num_points = 1 << 14;
  double half_extent = 0.0;  // 0 = automatic

  ReadoutModel readout;
  SensorDriveModel drive;

  // experiment
  std::string source = "synthetic";  // or "measured"
  std::vector<int> experiment_n{1, 2, 3, 4, 5, 6, 7, 8, 9};
  std::vector<double> voltages{1e-3, 2e-3, 3e-3, 4e-3, 5e-3, 6e-3, 7e-3, 8e-3, 9e-3, 10e-3};
  int replicates = 100;
  bool free_intercept = false;
  double noise_floor = 0.0;  // 0 = calibrate
  double jitter = 0.05;
  double calibration_tilt = 841.8e-12;

  // wva-sim
  int wva_n = 3;
  double wva_theta_bar = 0.1;  // 1/m
  WvaMethod wva_method = WvaMethod::ExactGrid;

  // oracle-verify (dimensionless instances: k = 1)
  int oracle_seeds = 20;
  int oracle_qfim_instances = 10;
  double oracle_waist = 2.0;
  double oracle_half_extent = 0.0;  // 0 = automatic

  std::uint64_t seed = 1;
  int threads = 0;
  std::string output_dir = "out";

  double wave_number() const;
  ProbeSpec probe() const;
  PostSelection post_selection() const;
  NetworkGeometry geometry(int n_sensors) const;
  /// Explicit distances if given, otherwise uniform with wva_n sensors.
  NetworkGeometry wva_geometry() const;
  SweepConfig sweep_config(unsigned threads) const;

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

/// Parses JSON text. Syntax errors report line and column; unknown keys and
/// wrong types report the field path. Validates before returning.
RunConfig parse_run_config(const std::string& text);
RunConfig load_run_config(const std::filesystem::path& path);
std::string run_config_to_json(const RunConfig& config);

}  // namespace cosense
