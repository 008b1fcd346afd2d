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

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

namespace ilqrgrad::cli {

enum ExitCode : int {
  kOk = 0,
  kToleranceFailure = 1,
  kConfigError = 2,
  kSolverFailure = 3,
};

struct RunConfig {
  std::string command;
  std::string model_id = "pendulum";
  int horizon = 0;  // 0 selects the model default
  double fp_tol = 1e-10;
  int max_iter = 200;
  std::string mode;  // gradcheck: full | last-layer; imitate: dx | cost
  std::string block = "dynamics";
  std::vector<std::uint64_t> seeds{0};
  std::string output_path;
  std::vector<int> iteration_counts{50, 100, 200, 300};
  std::vector<int> horizons{5, 10, 20};
  int train_size = 50;
  int epochs = 500;
  double learning_rate = 1e-2;
  double lr_decay = 1.0;
  double init_scale = 1.5;
  int alternation_period = 10;
  int repetitions = 5;
  double tolerance = 1e-3;
  double fd_step = 1e-5;
  std::string dataset_path;
};

nlohmann::json to_json(const RunConfig& cfg);

/// Overlays `j` on `base`; unknown keys and ill-typed values throw ConfigError.
RunConfig merge_config(RunConfig base, const nlohmann::json& j);

/// Rejects out-of-range values with ConfigError.
void validate(const RunConfig& cfg);

std::uint64_t fnv1a64(const std::string& text);
std::string config_hash(const RunConfig& cfg);

/// '#'-prefixed provenance lines: version, config, config hash, seed.
std::string output_header(const RunConfig& cfg, std::uint64_t seed);

/// Companion summary path: results.csv -> results.json.
std::string summary_path(const std::string& csv_path);

/// CSV goes to cfg.output_path, or to `out` when that is empty.
int cmd_gradcheck(const RunConfig& cfg, std::ostream& out, std::ostream& log);
int cmd_benchmark(const RunConfig& cfg, std::ostream& out, std::ostream& log);
int cmd_dataset(const RunConfig& cfg, std::ostream& out, std::ostream& log);
int cmd_imitate(const RunConfig& cfg, std::ostream& out, std::ostream& log);
int cmd_sysid(const RunConfig& cfg, std::ostream& out, std::ostream& log);

/// Parses argv, merges the optional config file under the flags, dispatches,
/// and maps exceptions to exit codes.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ilqrgrad::cli
