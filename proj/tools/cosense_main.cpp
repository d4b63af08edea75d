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

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "cosense/commands.hpp"
#include "cosense/errors.hpp"
#include "cosense/parallel.hpp"

namespace {

struct CommonFlags {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  int threads = 0;
};

void add_common(CLI::App* sub, CommonFlags& flags) {
  sub->add_option("--config", flags.config_path, "JSON run configuration")->check(CLI::ExistingFile);
  sub->add_option("--out", flags.out_dir, "output directory (overrides output_dir)");
  sub->add_option("--seed", flags.seed, "RNG seed (overrides seed)");
  sub->add_option("--threads", flags.threads, "worker threads (default: $COSENSE_THREADS or all cores)")
      ->check(CLI::NonNegativeNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cosense: cyclic distributed sensing with switched causal order"};
  app.require_subcommand(1);
  CommonFlags flags;

  struct Entry {
    const char* name;
    const char* help;
    int (*run)(const cosense::CommandContext&);
  };
  const Entry entries[] = {
      {"qcrb-sweep", "QCRB of every strategy over an N range", cosense::cmd_qcrb_sweep},
      {"oracle-verify", "cross-check closed forms against grid oracles", cosense::cmd_oracle_verify},
      {"reproduce-experiment", "SNR sweep, per-N fits and the scaling-law fit",
       cosense::cmd_reproduce_experiment},
      {"wva-sim", "single-point weak-value readout chain", cosense::cmd_wva_sim},
  };
  for (const auto& e : entries) add_common(app.add_subcommand(e.name, e.help), flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? cosense::kExitOk : cosense::kExitConfigError;
  }

  try {
    cosense::CommandContext ctx;
    if (!flags.config_path.empty()) ctx.config = cosense::load_run_config(flags.config_path);
    if (flags.seed) ctx.config.seed = *flags.seed;
    if (!flags.out_dir.empty()) ctx.config.output_dir = flags.out_dir;
    if (flags.threads > 0) ctx.config.threads = flags.threads;
    ctx.config.validate();
    ctx.output_dir = ctx.config.output_dir;
    ctx.threads = cosense::resolve_thread_count(ctx.config.threads);
    ctx.log = &std::cerr;

    for (const auto& e : entries) {
      if (app.got_subcommand(e.name)) return e.run(ctx);
    }
  } catch (const cosense::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return cosense::kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cosense::kExitCheckFailed;
  }
  return cosense::kExitCheckFailed;
}
