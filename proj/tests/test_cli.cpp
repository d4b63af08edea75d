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

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "cosense/commands.hpp"
#include "cosense/config.hpp"
#include "cosense/errors.hpp"
#include "json.hpp"

using namespace cosense;
namespace fs = std::filesystem;

namespace {

std::string config_error(const std::string& text) {
  try {
    parse_run_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class CliRun : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("cosense_cli_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write(const std::string& name, const std::string& text) {
    std::ofstream(dir_ / name) << text;
    return dir_ / name;
  }

  int run(const std::string& args) {
    const std::string cmd =
        std::string(COSENSE_CLI_PATH) + " " + args + " > " + (dir_ / "log.txt").string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  fs::path dir_;
};

}  // namespace

TEST(Config, EmptyDocumentGivesDefaults) {
  RunConfig c = parse_run_config("{}");
  EXPECT_DOUBLE_EQ(c.waist_radius, 2e-3);
  EXPECT_DOUBLE_EQ(c.wavelength, 780e-9);
  EXPECT_DOUBLE_EQ(c.z_bar, 0.2);
  EXPECT_DOUBLE_EQ(c.z_in, 0.325);
  EXPECT_EQ(c.modes.size(), 4u);
  EXPECT_EQ(c.num_points, 1 << 14);
  EXPECT_NEAR(c.post_selection().epsilon, std::atan(1.0 / 7.0), 1e-15);
}

TEST(Config, ExplicitEpsilonWins) {
  RunConfig c = parse_run_config(R"({"post_selection": {"epsilon": 0.2, "kind": "real"}})");
  EXPECT_DOUBLE_EQ(c.post_selection().epsilon, 0.2);
  EXPECT_EQ(c.post_selection().kind, WeakValueKind::Real);
}

TEST(Config, RoundTrip) {
  RunConfig c = parse_run_config(R"({
    "probe": {"waist_radius": 1e-3},
    "qcrb": {"modes": ["sequential", "quantum_switch"], "n_max": 7},
    "geometry": {"distances": [0.1, 0.2, 0.3]},
    "experiment": {"source": "measured"},
    "wva": {"method": "first_order"},
    "seed": 42
  })");
  const std::string once = run_config_to_json(c);
  const std::string twice = run_config_to_json(parse_run_config(once));
  EXPECT_EQ(once, twice);
  EXPECT_EQ(c.wva_geometry().n_sensors(), 2);
}

TEST(Config, ErrorsNameTheField) {
  EXPECT_NE(config_error(R"({"probe": {"waist": 1}})").find("probe.waist"), std::string::npos);
  EXPECT_NE(config_error(R"({"bogus": 1})").find("bogus"), std::string::npos);
  EXPECT_NE(config_error(R"({"qcrb": {"n_max": "ten"}})").find("qcrb.n_max"), std::string::npos);
  EXPECT_NE(config_error(R"({"probe": {"waist_radius": -1}})").find("waist_radius"),
            std::string::npos);
  EXPECT_NE(config_error(R"({"qcrb": {"n_min": 5, "n_max": 2}})").find("n_m"), std::string::npos);
  EXPECT_NE(config_error(R"({"qcrb": {"modes": ["indefinite"]}})").find("indefinite"),
            std::string::npos);
  EXPECT_NE(config_error(R"({"grid": {"num_points": 1000}})").find("num_points"),
            std::string::npos);
  EXPECT_NE(config_error(R"({"experiment": {"source": "lab"}})").find("source"),
            std::string::npos);
  EXPECT_FALSE(config_error("{\n  \"seed\": ,\n}").empty());
}

TEST(QcrbSweep, AllModesEveryN) {
  RunConfig c;
  const std::string csv = qcrb_sweep_csv(c, 1, 50);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "N,mode,qcrb,qcrb_times_N4,per_shot_precision");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 200);
  EXPECT_EQ(csv, qcrb_sweep_csv(c, 1, 50));
}

TEST(OracleChecks, DefaultsPass) {
  RunConfig c;
  c.oracle_seeds = 3;
  c.oracle_qfim_instances = 2;
  auto checks = run_oracle_checks(c, 1);
  for (const auto& ch : checks) EXPECT_TRUE(ch.pass) << ch.name << " " << ch.error;
  auto report = nlohmann::json::parse(oracle_report_json(checks));
  EXPECT_TRUE(report["all_pass"].get<bool>());
}

TEST_F(CliRun, QcrbSweepIsDeterministic) {
  ASSERT_EQ(run("qcrb-sweep --out " + (dir_ / "a").string()), 0);
  ASSERT_EQ(run("qcrb-sweep --threads 2 --out " + (dir_ / "b").string()), 0);
  EXPECT_EQ(slurp(dir_ / "a" / "qcrb_sweep.csv"), slurp(dir_ / "b" / "qcrb_sweep.csv"));
  EXPECT_TRUE(fs::exists(dir_ / "a" / "config.json"));
}

TEST_F(CliRun, SyntheticExperimentIsDeterministic) {
  auto cfg = write("c.json", R"({"experiment": {"replicates": 10}})");
  ASSERT_EQ(run("reproduce-experiment --config " + cfg.string() + " --seed 5 --threads 1 --out " +
                (dir_ / "a").string()),
            0);
  ASSERT_EQ(run("reproduce-experiment --config " + cfg.string() + " --seed 5 --threads 3 --out " +
                (dir_ / "b").string()),
            0);
  ASSERT_EQ(run("reproduce-experiment --config " + cfg.string() + " --seed 6 --out " +
                (dir_ / "c").string()),
            0);
  const std::string a = slurp(dir_ / "a" / "snr_sweep.csv");
  EXPECT_EQ(a, slurp(dir_ / "b" / "snr_sweep.csv"));
  EXPECT_NE(a, slurp(dir_ / "c" / "snr_sweep.csv"));
  auto fit = nlohmann::json::parse(slurp(dir_ / "a" / "scaling_fit.json"));
  EXPECT_NEAR(fit["b"].get<double>(), 4.25, 1e-9);
  EXPECT_TRUE(fs::exists(dir_ / "a" / "fitted_curve.dat"));
  EXPECT_TRUE(fs::exists(dir_ / "a" / "heisenberg_curve.dat"));
}

TEST_F(CliRun, MeasuredExperiment) {
  auto cfg = write("c.json", R"({"experiment": {"source": "measured"}})");
  ASSERT_EQ(run("reproduce-experiment --config " + cfg.string() + " --out " + dir_.string()), 0);
  auto fit = nlohmann::json::parse(slurp(dir_ / "scaling_fit.json"));
  EXPECT_NEAR(fit["a"].get<double>(), 4.7586e-9, 1e-12);
  EXPECT_FALSE(fs::exists(dir_ / "snr_sweep.csv"));
}

TEST_F(CliRun, WvaSim) {
  auto cfg = write("c.json", R"({"grid": {"num_points": 4096}, "wva": {"n_sensors": 1}})");
  ASSERT_EQ(run("wva-sim --config " + cfg.string() + " --out " + dir_.string()), 0);
  auto r = nlohmann::json::parse(slurp(dir_ / "wva_sim.json"));
  EXPECT_NEAR(r["mean_p"].get<double>() / r["predicted_mean_p"].get<double>(), 1.0, 1e-2);
  EXPECT_TRUE(fs::exists(dir_ / "final_probe.dat"));
}

TEST_F(CliRun, BadConfigExitsTwo) {
  auto cfg = write("bad.json", R"({"probe": {"waist": 1}})");
  EXPECT_EQ(run("qcrb-sweep --config " + cfg.string() + " --out " + dir_.string()), 2);
  EXPECT_NE(slurp(dir_ / "log.txt").find("probe.waist"), std::string::npos);
  EXPECT_EQ(run("qcrb-sweep --config " + (dir_ / "missing.json").string()), 2);
  EXPECT_EQ(run("no-such-command"), 2);
}

TEST_F(CliRun, FailedOracleExitsOne) {
  auto cfg = write("coarse.json",
                   R"({"grid": {"num_points": 256}, "oracle": {"half_extent": 400, "seeds": 2,
                       "qfim_instances": 1}})");
  EXPECT_EQ(run("oracle-verify --config " + cfg.string() + " --out " + dir_.string()), 1);
  auto r = nlohmann::json::parse(slurp(dir_ / "oracle_report.json"));
  EXPECT_FALSE(r["all_pass"].get<bool>());
  EXPECT_GT(r["failed"].get<int>(), 0);
}
