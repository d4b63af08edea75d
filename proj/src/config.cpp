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

#include "cosense/config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "cosense/errors.hpp"
#include "json.hpp"

namespace cosense {
namespace {

using nlohmann::json;

// Reads one JSON object, remembering which keys were consumed so leftovers
// can be reported as unknown fields.
class Section {
 public:
  Section(const json* node, std::string path) : node_(node), path_(std::move(path)) {
    if (node_ != nullptr && !node_->is_object()) {
      throw ConfigError(label() + ": expected an object");
    }
  }

  template <typename T>
  void read(const char* key, T& out) {
    const json* v = find(key);
    if (v == nullptr) return;
    try {
      if constexpr (std::is_same_v<T, double>) {
        if (!v->is_number()) throw ConfigError(field(key) + ": expected a number");
      } else if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
        if (!v->is_number_integer()) throw ConfigError(field(key) + ": expected an integer");
      }
      out = v->get<T>();
    } catch (const json::exception&) {
      throw ConfigError(field(key) + ": wrong type (" + std::string(v->type_name()) + ")");
    }
  }

  void read_string(const char* key, std::string& out) {
    const json* v = find(key);
    if (v == nullptr) return;
    if (!v->is_string()) throw ConfigError(field(key) + ": expected a string");
    out = v->get<std::string>();
  }

  Section child(const char* key) { return Section(find(key), field(key)); }

  std::string field(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

  void finish() const {
    if (node_ == nullptr) return;
    for (auto it = node_->begin(); it != node_->end(); ++it) {
      if (!used_.count(it.key())) {
        throw ConfigError(field(it.key().c_str()) + ": unknown field");
      }
    }
  }

 private:
  const json* find(const char* key) {
    if (node_ == nullptr) return nullptr;
    auto it = node_->find(key);
    if (it == node_->end()) return nullptr;
    used_.insert(key);
    return &*it;
  }
  std::string label() const { return path_.empty() ? "config" : path_; }

  const json* node_;
  std::string path_;
  std::set<std::string> used_;
};

std::string_view kind_name(WeakValueKind k) {
  return k == WeakValueKind::Imaginary ? "imaginary" : "real";
}

std::string_view method_name(WvaMethod m) {
  return m == WvaMethod::ExactGrid ? "exact_grid" : "first_order";
}

}  // namespace

double RunConfig::wave_number() const { return 2.0 * std::numbers::pi / wavelength; }

ProbeSpec RunConfig::probe() const {
  return ProbeSpec{waist_radius, wave_number(), center_x, center_p};
}

PostSelection RunConfig::post_selection() const {
  if (epsilon > 0.0) return PostSelection{epsilon, weak_value_kind};
  return PostSelection::from_weak_value_magnitude(weak_value, weak_value_kind);
}

NetworkGeometry RunConfig::geometry(int n_sensors) const {
  return NetworkGeometry::uniform(n_sensors, z_bar, wave_number(), z_in, z_out);
}

NetworkGeometry RunConfig::wva_geometry() const {
  if (distances.empty()) return geometry(wva_n);
  NetworkGeometry g;
  g.distances = distances;
  g.lead_in = z_in;
  g.lead_out = z_out;
  g.wave_number = wave_number();
  g.validate();
  return g;
}

SweepConfig RunConfig::sweep_config(unsigned thread_count) const {
  SweepConfig s;
  s.n_values = experiment_n;
  s.voltages = voltages;
  s.replicates = replicates;
  s.z_bar = z_bar;
  s.lead_in = z_in;
  s.lead_out = z_out;
  s.context = ReadoutContext{probe(), post_selection(), readout};
  s.drive = drive;
  s.noise = NoiseModel{noise_floor, jitter};
  s.calibration_tilt = calibration_tilt;
  s.free_intercept = free_intercept;
  s.seed = seed;
  s.threads = thread_count;
  return s;
}

void RunConfig::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw ConfigError(std::string(name) + ": must be a finite positive number");
    }
  };
  auto non_negative = [](double v, const char* name) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw ConfigError(std::string(name) + ": must be a finite number >= 0");
    }
  };
  positive(waist_radius, "probe.waist_radius");
  positive(wavelength, "probe.wavelength");
  positive(z_bar, "geometry.z_bar");
  non_negative(z_in, "geometry.z_in");
  non_negative(z_out, "geometry.z_out");
  if (!distances.empty()) {
    if (distances.size() < 2) throw ConfigError("geometry.distances: needs N+1 >= 2 entries");
    for (double d : distances) non_negative(d, "geometry.distances[]");
  }
  if (modes.empty()) throw ConfigError("qcrb.modes: must name at least one mode");
  if (n_min < 1) throw ConfigError("qcrb.n_min: must be >= 1");
  if (n_max < n_min) throw ConfigError("qcrb.n_max: must be >= qcrb.n_min");
  if (trials < 1) throw ConfigError("qcrb.trials: must be >= 1");
  if (epsilon > 0.0) {
    if (!(epsilon < std::numbers::pi / 2.0)) {
      throw ConfigError("post_selection.epsilon: must satisfy 0 < epsilon < pi/2");
    }
  } else {
    positive(weak_value, "post_selection.weak_value");
  }
  if (num_points < 4 || (num_points & (num_points - 1)) != 0) {
    throw ConfigError("grid.num_points: must be a power of two >= 4");
  }
  non_negative(half_extent, "grid.half_extent");
  positive(readout.focal_length, "readout.focal_length");
  positive(readout.qpd_gain, "readout.qpd_gain");
  positive(readout.total_power, "readout.total_power");
  positive(readout.position_slope, "readout.position_slope");
  positive(drive.pzt_displacement_per_volt, "drive.pzt_displacement_per_volt");
  positive(drive.chip_separation, "drive.chip_separation");
  positive(drive.beam_tilt_factor, "drive.beam_tilt_factor");
  if (source != "synthetic" && source != "measured") {
    throw ConfigError("experiment.source: expected \"synthetic\" or \"measured\"");
  }
  if (experiment_n.empty()) throw ConfigError("experiment.n_values: must not be empty");
  for (int n : experiment_n) {
    if (n < 1) throw ConfigError("experiment.n_values: entries must be >= 1");
  }
  if (voltages.size() < 2) throw ConfigError("experiment.voltages: needs at least two entries");
  for (double v : voltages) positive(v, "experiment.voltages[]");
  if (replicates < 1) throw ConfigError("experiment.replicates: must be >= 1");
  non_negative(noise_floor, "noise.floor");
  non_negative(jitter, "noise.jitter");
  positive(calibration_tilt, "noise.calibration_tilt");
  if (wva_n < 1) throw ConfigError("wva.n_sensors: must be >= 1");
  if (!std::isfinite(wva_theta_bar)) throw ConfigError("wva.theta_bar: must be finite");
  if (oracle_seeds < 1) throw ConfigError("oracle.seeds: must be >= 1");
  if (oracle_qfim_instances < 1) throw ConfigError("oracle.qfim_instances: must be >= 1");
  positive(oracle_waist, "oracle.waist_radius");
  non_negative(oracle_half_extent, "oracle.half_extent");
  if (threads < 0) throw ConfigError("threads: must be >= 0");
  if (output_dir.empty()) throw ConfigError("output_dir: must not be empty");
}

RunConfig parse_run_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  RunConfig c;
  Section top(&root, "");

  Section probe = top.child("probe");
  probe.read("waist_radius", c.waist_radius);
  probe.read("wavelength", c.wavelength);
  probe.read("center_x", c.center_x);
  probe.read("center_p", c.center_p);
  probe.finish();

  Section geom = top.child("geometry");
  geom.read("z_bar", c.z_bar);
  geom.read("z_in", c.z_in);
  geom.read("z_out", c.z_out);
  geom.read("distances", c.distances);
  geom.finish();

  Section qcrb = top.child("qcrb");
  std::vector<std::string> mode_names;
  qcrb.read("modes", mode_names);
  if (!mode_names.empty()) {
    c.modes.clear();
    for (const auto& name : mode_names) {
      if (name == "all") {
        c.modes = all_switch_modes();
        break;
      }
      try {
        c.modes.push_back(parse_switch_mode(name));
      } catch (const ConfigError& e) {
        throw ConfigError("qcrb.modes: " + std::string(e.what()));
      }
    }
  }
  qcrb.read("n_min", c.n_min);
  qcrb.read("n_max", c.n_max);
  qcrb.read("trials", c.trials);
  qcrb.finish();

  Section post = top.child("post_selection");
  post.read("weak_value", c.weak_value);
  post.read("epsilon", c.epsilon);
  std::string kind;
  post.read_string("kind", kind);
  if (kind == "real") {
    c.weak_value_kind = WeakValueKind::Real;
  } else if (!kind.empty() && kind != "imaginary") {
    throw ConfigError("post_selection.kind: expected \"imaginary\" or \"real\"");
  }
  post.finish();

  Section grid = top.child("grid");
  grid.read("num_points", c.num_points);
  grid.read("half_extent", c.half_extent);
  grid.finish();

  Section readout = top.child("readout");
  readout.read("focal_length", c.readout.focal_length);
  readout.read("qpd_gain", c.readout.qpd_gain);
  readout.read("total_power", c.readout.total_power);
  readout.read("position_slope", c.readout.position_slope);
  readout.finish();

  Section drive = top.child("drive");
  drive.read("pzt_displacement_per_volt", c.drive.pzt_displacement_per_volt);
  drive.read("chip_separation", c.drive.chip_separation);
  drive.read("beam_tilt_factor", c.drive.beam_tilt_factor);
  drive.finish();

  Section exp = top.child("experiment");
  exp.read_string("source", c.source);
  exp.read("n_values", c.experiment_n);
  exp.read("voltages", c.voltages);
  exp.read("replicates", c.replicates);
  exp.read("free_intercept", c.free_intercept);
  exp.finish();

  Section noise = top.child("noise");
  noise.read("floor", c.noise_floor);
  noise.read("jitter", c.jitter);
  noise.read("calibration_tilt", c.calibration_tilt);
  noise.finish();

  Section wva = top.child("wva");
  wva.read("n_sensors", c.wva_n);
  wva.read("theta_bar", c.wva_theta_bar);
  std::string method;
  wva.read_string("method", method);
  if (method == "first_order") {
    c.wva_method = WvaMethod::FirstOrder;
  } else if (!method.empty() && method != "exact_grid") {
    throw ConfigError("wva.method: expected \"exact_grid\" or \"first_order\"");
  }
  wva.finish();

  Section oracle = top.child("oracle");
  oracle.read("seeds", c.oracle_seeds);
  oracle.read("qfim_instances", c.oracle_qfim_instances);
  oracle.read("waist_radius", c.oracle_waist);
  oracle.read("half_extent", c.oracle_half_extent);
  oracle.finish();

  top.read("seed", c.seed);
  top.read("threads", c.threads);
  top.read_string("output_dir", c.output_dir);
  top.finish();

  c.validate();
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_run_config(buf.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::string run_config_to_json(const RunConfig& c) {
  json modes = json::array();
  for (SwitchMode m : c.modes) modes.push_back(std::string(to_string(m)));
  json j = {
      {"probe",
       {{"waist_radius", c.waist_radius},
        {"wavelength", c.wavelength},
        {"center_x", c.center_x},
        {"center_p", c.center_p}}},
      {"geometry",
       {{"z_bar", c.z_bar}, {"z_in", c.z_in}, {"z_out", c.z_out}, {"distances", c.distances}}},
      {"qcrb", {{"modes", modes}, {"n_min", c.n_min}, {"n_max", c.n_max}, {"trials", c.trials}}},
      {"post_selection",
       {{"weak_value", c.weak_value},
        {"epsilon", c.epsilon},
        {"kind", std::string(kind_name(c.weak_value_kind))}}},
      {"grid", {{"num_points", c.num_points}, {"half_extent", c.half_extent}}},
      {"readout",
       {{"focal_length", c.readout.focal_length},
        {"qpd_gain", c.readout.qpd_gain},
        {"total_power", c.readout.total_power},
        {"position_slope", c.readout.position_slope}}},
      {"drive",
       {{"pzt_displacement_per_volt", c.drive.pzt_displacement_per_volt},
        {"chip_separation", c.drive.chip_separation},
        {"beam_tilt_factor", c.drive.beam_tilt_factor}}},
      {"experiment",
       {{"source", c.source},
        {"n_values", c.experiment_n},
        {"voltages", c.voltages},
        {"replicates", c.replicates},
        {"free_intercept", c.free_intercept}}},
      {"noise",
       {{"floor", c.noise_floor}, {"jitter", c.jitter}, {"calibration_tilt", c.calibration_tilt}}},
      {"wva",
       {{"n_sensors", c.wva_n},
        {"theta_bar", c.wva_theta_bar},
        {"method", std::string(method_name(c.wva_method))}}},
      {"oracle",
       {{"seeds", c.oracle_seeds},
        {"qfim_instances", c.oracle_qfim_instances},
        {"waist_radius", c.oracle_waist},
        {"half_extent", c.oracle_half_extent}}},
      {"seed", c.seed},
      {"threads", c.threads},
      {"output_dir", c.output_dir},
  };
  return j.dump(2) + "\n";
}

}  // namespace cosense
