// Copyright 2026 The ilqrgrad Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "ilqrgrad/types.hpp"

namespace ilqrgrad::cli {
namespace {

namespace fs = std::filesystem;

int invoke(std::vector<std::string> args, std::string* out_text = nullptr,
           std::string* err_text = nullptr) {
  args.insert(args.begin(), "ilqrgrad");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  if (out_text) *out_text = out.str();
  if (err_text) *err_text = err.str();
  return code;
}

std::string read(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string body_of(const std::string& csv) {
  std::istringstream in(csv);
  std::string line, body;
  while (std::getline(in, line))
    if (line.empty() || line[0] != '#') body += line + "\n";
  return body;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("ilqrgrad_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  fs::path dir_;
};

TEST(Config, MergeOverridesAndRejectsUnknownKeys) {
  RunConfig base;
  const RunConfig merged = merge_config(base, {{"horizon", 7}, {"seeds", {1, 2}}});
  EXPECT_EQ(merged.horizon, 7);
  EXPECT_EQ(merged.seeds, (std::vector<std::uint64_t>{1, 2}));
  EXPECT_EQ(merged.model_id, base.model_id);
  EXPECT_THROW(merge_config(base, {{"horizn", 7}}), ConfigError);
  EXPECT_THROW(merge_config(base, {{"horizon", "seven"}}), ConfigError);
  RunConfig bad;
  bad.fp_tol = -1.0;
  EXPECT_THROW(validate(bad), ConfigError);
}

TEST(Config, HashIsStableAndSensitive) {
  RunConfig a, b;
  EXPECT_EQ(config_hash(a), config_hash(b));
  b.horizon = 3;
  EXPECT_NE(config_hash(a), config_hash(b));
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
  const std::string h = output_header(a, 7);
  EXPECT_NE(h.find("# config_hash " + config_hash(a)), std::string::npos);
  EXPECT_NE(h.find("# seed 7"), std::string::npos);
  EXPECT_NE(h.find(ILQRGRAD_VERSION), std::string::npos);
  EXPECT_EQ(summary_path("out/run.csv"), "out/run.json");
  EXPECT_EQ(summary_path("a.b/run"), "a.b/run.json");
}

TEST_F(CliTest, GradcheckOnLinearModelIsExact) {
  const fs::path csv = dir_ / "g.csv";
  ASSERT_EQ(invoke({"gradcheck", "--model", "linear-test", "-T", "6", "--block", "all",
                    "--seeds", "1", "2", "-o", csv.string()}),
            kOk);
  const std::string text = read(csv);
  EXPECT_NE(text.find("# config_hash"), std::string::npos);
  std::istringstream in(body_of(text));
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "seed,parameter,implicit_vs_fd,implicit_vs_unrolled,status");
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    std::stringstream ss(line);
    std::string seed, name, e_fd;
    std::getline(ss, seed, ',');
    std::getline(ss, name, ',');
    std::getline(ss, e_fd, ',');
    EXPECT_LT(std::stod(e_fd), 1e-8) << line;
  }
  EXPECT_EQ(rows, 2 * 8);
  const auto summary = nlohmann::json::parse(read(dir_ / "g.json"));
  EXPECT_TRUE(summary["within_tolerance"].get<bool>());
  EXPECT_EQ(summary["config_hash"], config_hash(merge_config(RunConfig{}, summary["config"])));
}

TEST_F(CliTest, GradcheckToleranceFailureExitsOne) {
  EXPECT_EQ(invoke({"gradcheck", "--model", "pendulum", "-T", "10", "--mode", "last-layer",
                    "--tolerance", "1e-6", "-o", (dir_ / "g.csv").string()}),
            kToleranceFailure);
}

TEST_F(CliTest, ConfigFileIsOverriddenByFlags) {
  const fs::path cfg = dir_ / "cfg.json";
  std::ofstream(cfg) << R"({"model_id": "linear-test", "horizon": 4, "seeds": [3]})";
  std::string out;
  ASSERT_EQ(invoke({"--config", cfg.string(), "gradcheck", "-T", "5"}, &out), kOk);
  EXPECT_NE(out.find("\"horizon\":5"), std::string::npos);
  EXPECT_NE(out.find("\"model_id\":\"linear-test\""), std::string::npos);
  EXPECT_NE(out.find("# seed 3"), std::string::npos);
}

TEST_F(CliTest, ConfigurationErrorsExitTwo) {
  EXPECT_EQ(invoke({"gradcheck", "--model", "nope"}), kConfigError);
  EXPECT_EQ(invoke({"gradcheck", "--bogus-flag"}), kConfigError);
  EXPECT_EQ(invoke({}), kConfigError);
  const fs::path cfg = dir_ / "bad.json";
  std::ofstream(cfg) << R"({"unknown": 1})";
  EXPECT_EQ(invoke({"--config", cfg.string(), "gradcheck"}), kConfigError);
  EXPECT_EQ(invoke({"--config", (dir_ / "missing.json").string(), "gradcheck"}), kConfigError);
  EXPECT_EQ(invoke({"imitate", "--mode", "nn"}), kConfigError);
}

TEST_F(CliTest, SolverFailureExitsThree) {
  EXPECT_EQ(invoke({"dataset", "--model", "pendulum", "--max-iter", "1", "--fp-tol", "1e-14",
                    "--train-size", "2", "-o", (dir_ / "d.jsonl").string()}),
            kSolverFailure);
}

TEST_F(CliTest, ImitateIsDeterministicAndReportsPerDimensionTheta) {
  const std::vector<std::string> args{"imitate", "--model", "cartpole", "--mode", "cost",
                                      "--epochs", "3", "--train-size", "4", "-T", "10",
                                      "--seeds", "5"};
  auto a = args, b = args;
  a.insert(a.end(), {"-o", (dir_ / "a.csv").string()});
  b.insert(b.end(), {"-o", (dir_ / "b.csv").string()});
  ASSERT_EQ(invoke(a), kOk);
  ASSERT_EQ(invoke(b), kOk);
  const std::string ta = read(dir_ / "a.csv"), tb = read(dir_ / "b.csv");
  EXPECT_EQ(body_of(ta), body_of(tb));
  EXPECT_NE(ta.find("theta_w0"), std::string::npos);
  const auto summary = nlohmann::json::parse(read(dir_ / "a.json"));
  EXPECT_EQ(summary["trials"].size(), 1u);
  EXPECT_GE(summary["bad_value_ratio"].get<double>(), 0.0);
}

TEST_F(CliTest, DatasetThenSysidReportsImitationLoss) {
  const fs::path data = dir_ / "d.jsonl";
  ASSERT_EQ(invoke({"dataset", "--model", "cartpole", "--train-size", "6", "--seeds", "2", "-o",
                    data.string()}),
            kOk);
  ASSERT_EQ(invoke({"sysid", "--model", "cartpole", "--dataset", data.string(), "--init-scale",
                    "1.2", "-o", (dir_ / "s.csv").string()}),
            kOk);
  const auto summary = nlohmann::json::parse(read(dir_ / "s.json"));
  const auto& trial = summary["trials"][0];
  EXPECT_TRUE(trial.contains("imitation_loss"));
  EXPECT_LT(trial["imitation_loss"].get<double>(), 1e-10);
  EXPECT_FALSE(trial["under_determined"].get<bool>());
}

TEST_F(CliTest, BenchmarkRowsForSingleIterationCount) {
  const fs::path csv = dir_ / "b.csv";
  ASSERT_EQ(invoke({"benchmark", "--horizons", "5", "--iterations", "20", "--repetitions", "1",
                    "-o", csv.string()}),
            kOk);
  const std::string body = body_of(read(csv));
  EXPECT_EQ(body.substr(0, body.find('\n')), "horizon,N,implicit_backward_ms,unrolled_ms,ratio");
  EXPECT_NE(body.find("\n5,20,"), std::string::npos);
}

}  // namespace
}  // namespace ilqrgrad::cli
