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

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "cosense/config.hpp"

namespace cosense {

enum ExitCode : int { kExitOk = 0, kExitCheckFailed = 1, kExitConfigError = 2 };

struct CommandContext {
  RunConfig config;
  std::filesystem::path output_dir;
  unsigned threads = 1;
  std::ostream* log = nullptr;  // progress messages; null = silent
};

struct OracleCheck {
  std::string name;
  double analytic = 0.0;
  double oracle = 0.0;
  double rel_error = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string error;  // set when the check threw
};

/// CSV with header N,mode,qcrb,qcrb_times_N4,per_shot_precision.
std::string qcrb_sweep_csv(const RunConfig& config, int n_min, int n_max);

std::vector<OracleCheck> run_oracle_checks(const RunConfig& config, unsigned threads);
std::string oracle_report_json(const std::vector<OracleCheck>& checks);

// Each command writes its files plus config.json into output_dir and
// returns an ExitCode.
int cmd_qcrb_sweep(const CommandContext& ctx);
int cmd_oracle_verify(const CommandContext& ctx);
int cmd_reproduce_experiment(const CommandContext& ctx);
int cmd_wva_sim(const CommandContext& ctx);

}  // namespace cosense
