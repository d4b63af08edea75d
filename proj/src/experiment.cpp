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

#include "cosense/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include <Eigen/Dense>

#include "cosense/errors.hpp"
#include "cosense/parallel.hpp"

namespace cosense {
namespace {

double r_squared(const std::vector<double>& y, const std::vector<double>& fitted) {
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(y.size());
  double ss_res = 0.0;
  double ss_tot = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    ss_res += (y[i] - fitted[i]) * (y[i] - fitted[i]);
    ss_tot += (y[i] - mean) * (y[i] - mean);
  }
  return ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : (ss_res == 0.0 ? 1.0 : 0.0);
}

}  // namespace

double SensorDriveModel::beam_tilt_per_volt() const {
  // Antiphase chips: each end moves by half the stroke, the mirror tilts by
  // stroke/separation and the reflected beam by twice that.
  const double mirror = 2.0 * (0.5 * pzt_displacement_per_volt) / chip_separation;
  return beam_tilt_factor * mirror;
}

void SensorDriveModel::validate() const {
  if (!(pzt_displacement_per_volt > 0.0)) throw ConfigError("drive.pzt_nm_per_volt must be positive");
  if (!(chip_separation > 0.0)) throw ConfigError("drive.chip_separation must be positive");
  if (!(beam_tilt_factor > 0.0)) throw ConfigError("drive.beam_tilt_factor must be positive");
}

double voltage_to_beam_tilt(double v_pp, const SensorDriveModel& model) {
  if (!(v_pp >= 0.0)) throw PreconditionError("drive voltage must be >= 0");
  model.validate();
  return v_pp * model.beam_tilt_per_volt();
}

double beam_tilt_to_voltage(double tilt, const SensorDriveModel& model) {
  model.validate();
  return tilt / model.beam_tilt_per_volt();
}

void NoiseModel::validate() const {
  if (!(noise_floor > 0.0)) throw ConfigError("noise.floor must be positive");
  if (!(relative_jitter >= 0.0)) throw ConfigError("noise.jitter must be >= 0");
}

double snr_model(int n_sensors, double phi_bar, const NetworkGeometry& geom,
                 const NoiseModel& noise, const ReadoutContext& ctx) {
  noise.validate();
  if (geom.n_sensors() != n_sensors) {
    throw PreconditionError("snr_model: geometry does not match the sensor count");
  }
  const QpdSignal s = qpd_signal(phi_bar, geom, ctx.probe, ctx.post_selection, ctx.readout);
  return std::abs(s.voltage) / noise.noise_floor;
}

double calibrate_noise_floor(double phi_bar, const NetworkGeometry& geom,
                             const ReadoutContext& ctx) {
  if (!(phi_bar > 0.0)) throw PreconditionError("calibration tilt must be positive");
  return qpd_signal(phi_bar, geom, ctx.probe, ctx.post_selection, ctx.readout).voltage;
}

SnrFit fit_snr_vs_voltage(const std::vector<SnrSample>& samples, bool free_intercept,
                          const SensorDriveModel& drive) {
  if (samples.empty()) throw FitError("SNR fit: no samples");
  const int n = samples.front().n_sensors;
  std::set<double> distinct;
  bool any_signal = false;
  for (const auto& s : samples) {
    if (s.n_sensors != n) throw FitError("SNR fit: samples mix different sensor counts");
    if (!(s.drive_voltage_pp >= 0.0) || !(s.snr >= 0.0)) {
      throw FitError("SNR fit: voltages and SNR values must be >= 0");
    }
    distinct.insert(s.drive_voltage_pp);
    any_signal = any_signal || s.snr > 0.0;
  }
  if (distinct.size() < 2) throw FitError("SNR fit: needs at least two distinct voltages");
  if (!any_signal) throw FitError("SNR fit: all SNR values are zero");

  SnrFit fit;
  fit.n_sensors = n;
  const auto m = static_cast<double>(samples.size());
  double sv = 0.0, sy = 0.0, svv = 0.0, svy = 0.0;
  for (const auto& s : samples) {
    sv += s.drive_voltage_pp;
    sy += s.snr;
    svv += s.drive_voltage_pp * s.drive_voltage_pp;
    svy += s.drive_voltage_pp * s.snr;
  }
  if (free_intercept) {
    const double det = m * svv - sv * sv;
    fit.slope = (m * svy - sv * sy) / det;
    fit.intercept = (sy - fit.slope * sv) / m;
  } else {
    fit.slope = svy / svv;
  }
  if (!(fit.slope > 0.0)) {
    std::ostringstream msg;
    msg << "SNR fit for N = " << n << " produced non-positive slope " << fit.slope;
    throw FitError(msg.str());
  }

  std::vector<double> y;
  std::vector<double> yhat;
  for (const auto& s : samples) {
    y.push_back(s.snr);
    yhat.push_back(fit.slope * s.drive_voltage_pp + fit.intercept);
  }
  fit.r_squared = r_squared(y, yhat);
  fit.min_voltage = (1.0 - fit.intercept) / fit.slope;
  if (!(fit.min_voltage > 0.0)) throw FitError("SNR fit: SNR = 1 reached at non-positive voltage");
  fit.min_tilt = voltage_to_beam_tilt(fit.min_voltage, drive);
  return fit;
}

ScalingFit fit_scaling_law(const std::vector<ScalingPoint>& points) {
  std::set<int> distinct;
  for (const auto& p : points) {
    if (p.n_sensors < 1) throw FitError("scaling fit: sensor counts must be >= 1");
    if (!(p.min_tilt > 0.0)) {
      std::ostringstream msg;
      msg << "scaling fit: minimum tilt for N = " << p.n_sensors << " must be positive, got "
          << p.min_tilt;
      throw FitError(msg.str());
    }
    distinct.insert(p.n_sensors);
  }
  if (distinct.size() < 3) throw FitError("scaling fit: needs at least three distinct N");

  const auto rows = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd design(rows, 2);
  Eigen::VectorXd rhs(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const double n = points[static_cast<std::size_t>(i)].n_sensors;
    design(i, 0) = n * n;
    design(i, 1) = n;
    rhs(i) = 1.0 / points[static_cast<std::size_t>(i)].min_tilt;
  }
  const Eigen::Vector2d c = design.colPivHouseholderQr().solve(rhs);
  if (!(c(0) > 0.0)) throw FitError("scaling fit: N^2 coefficient is not positive");

  ScalingFit fit;
  fit.a = 1.0 / c(0);
  fit.b = c(1) * fit.a;
  std::vector<double> y;
  std::vector<double> yhat;
  for (const auto& p : points) {
    y.push_back(p.min_tilt);
    yhat.push_back(fit.curve(p.n_sensors));
  }
  fit.r_squared = r_squared(y, yhat);
  return fit;
}

const std::vector<MeasuredPrecision>& measured_precision_dataset() {
  static const std::vector<MeasuredPrecision> data = {
      {1, 382.6e-6, 841.8e-12}, {2, 175.3e-6, 385.7e-12}, {3, 98.6e-6, 217.0e-12},
      {4, 65.5e-6, 144.1e-12},  {5, 46.8e-6, 103.1e-12},  {6, 35.5e-6, 77.7e-12},
      {7, 27.6e-6, 60.6e-12},   {8, 22.2e-6, 48.9e-12},   {9, 18.1e-6, 39.8e-12},
  };
  return data;
}

std::vector<ScalingPoint> measured_scaling_points() {
  std::vector<ScalingPoint> out;
  for (const auto& m : measured_precision_dataset()) out.push_back({m.n_sensors, m.min_tilt});
  return out;
}

SweepConfig SweepConfig::experiment_defaults() {
  SweepConfig c;
  for (int mv = 1; mv <= 10; ++mv) c.voltages.push_back(mv * 1e-3);
  c.context.probe = ProbeSpec::from_wavelength(2e-3, 780e-9);
  c.context.post_selection = PostSelection::from_weak_value_magnitude(7.0);
  c.noise.noise_floor = 0.0;
  c.noise.relative_jitter = 0.05;
  return c;
}

void SweepConfig::validate() const {
  if (n_values.empty()) throw ConfigError("sweep.n_values must not be empty");
  for (int n : n_values) {
    if (n < 1) throw ConfigError("sweep.n_values entries must be >= 1");
  }
  if (voltages.size() < 2) throw ConfigError("sweep.voltages needs at least two entries");
  for (double v : voltages) {
    if (!(v > 0.0)) throw ConfigError("sweep.voltages entries must be positive");
  }
  if (replicates < 1) throw ConfigError("sweep.replicates must be >= 1");
  if (!(z_bar > 0.0)) throw ConfigError("geometry.z_bar must be positive");
  if (!(lead_in >= 0.0)) throw ConfigError("geometry.z_in must be >= 0");
  if (!(lead_out >= 0.0)) throw ConfigError("geometry.z_out must be >= 0");
  if (!(noise.relative_jitter >= 0.0)) throw ConfigError("noise.jitter must be >= 0");
  if (noise.noise_floor <= 0.0 && !(calibration_tilt > 0.0)) {
    throw ConfigError("noise.calibration_tilt must be positive when noise.floor is not set");
  }
  context.probe.validate();
  context.post_selection.validate();
  context.readout.validate();
  drive.validate();
}

SweepReport end_to_end_sweep(const SweepConfig& config) {
  config.validate();
  const double k = config.context.probe.wave_number;
  auto geometry_for = [&](int n) {
    return NetworkGeometry::uniform(n, config.z_bar, k, config.lead_in, config.lead_out);
  };

  SweepReport report;
  report.noise_floor = config.noise.noise_floor > 0.0
                           ? config.noise.noise_floor
                           : calibrate_noise_floor(config.calibration_tilt, geometry_for(1),
                                                   config.context);
  const NoiseModel noise{report.noise_floor, config.noise.relative_jitter};

  const std::size_t nv = config.voltages.size();
  const auto reps = static_cast<std::size_t>(config.replicates);
  const std::size_t cells = config.n_values.size() * nv;
  report.samples.resize(cells * reps);

  parallel_for(cells, config.threads, [&](std::size_t cell) {
    const std::size_t ni = cell / nv;
    const std::size_t vi = cell % nv;
    const int n = config.n_values[ni];
    const double v = config.voltages[vi];
    const double phi = voltage_to_beam_tilt(v, config.drive);
    const double clean = snr_model(n, phi, geometry_for(n), noise, config.context);
    for (std::size_t r = 0; r < reps; ++r) {
      double factor = 1.0;
      if (noise.relative_jitter > 0.0) {
        // Stream keyed by (seed, voltage, replicate) only: identical noise for every N.
        std::seed_seq seq{static_cast<std::uint32_t>(config.seed),
                          static_cast<std::uint32_t>(config.seed >> 32),
                          static_cast<std::uint32_t>(vi), static_cast<std::uint32_t>(r)};
        std::mt19937_64 rng(seq);
        std::lognormal_distribution<double> jitter(0.0, noise.relative_jitter);
        factor = jitter(rng);
      }
      report.samples[cell * reps + r] = SnrSample{n, v, clean / factor, static_cast<int>(r)};
    }
  });

  std::vector<ScalingPoint> points;
  for (std::size_t ni = 0; ni < config.n_values.size(); ++ni) {
    const auto first = report.samples.begin() + static_cast<std::ptrdiff_t>(ni * nv * reps);
    const std::vector<SnrSample> group(first, first + static_cast<std::ptrdiff_t>(nv * reps));
    const SnrFit fit = fit_snr_vs_voltage(group, config.free_intercept, config.drive);
    report.fits.push_back(fit);
    points.push_back({fit.n_sensors, fit.min_tilt});
  }
  if (std::set<int>(config.n_values.begin(), config.n_values.end()).size() >= 3) {
    report.scaling = fit_scaling_law(points);
    report.has_scaling = true;
  }
  return report;
}

}  // namespace cosense
