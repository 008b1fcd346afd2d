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
#include <random>
#include <span>
#include <string>
#include <vector>

#include "ilqrgrad/implicit_diff.hpp"

namespace ilqrgrad {

/// One expert demonstration: controls and states of a converged iLQR solve at
/// the true parameters.
struct ExpertRecord {
  Vec x_init;
  Mat U;  // m x T
  Mat X;  // n x T
  int T = 0;
  std::string model_id;
  std::uint64_t seed = 0;
};

struct DatasetSplit {
  std::vector<int> train;
  std::vector<int> validation;
  std::vector<int> test;
};

struct ExpertDataset {
  std::string model_id;
  std::vector<ExpertRecord> records;
  DatasetSplit split;
};

struct DatasetOptions {
  int max_attempts_per_record = 20;
  IlqrOptions ilqr;
};

/// Uniform draw from the model's initial-state box.
Vec sample_initial_state(const ModelSpec& spec, std::mt19937_64& rng);

/// Validation and test sets each get a fifth of the records; the rest train.
DatasetSplit make_split(int count);

/// Total record count giving `train_size` training records under make_split.
int records_for_train_size(int train_size);

/// Initial states are drawn uniformly from the spec's sampling box; draws
/// whose solve does not converge are replaced. Deterministic under `seed`.
ExpertDataset generate_dataset(const ModelSpec& spec, const Problem& problem,
                               const Params& theta_true, int count, std::uint64_t seed,
                               const DatasetOptions& opts = {});

/// One JSON object per line: {x_init, U, X, T, model_id, seed}.
void write_jsonl(const ExpertDataset& data, const std::string& path);
ExpertDataset read_jsonl(const std::string& path);
std::string record_to_json(const ExpertRecord& rec);
ExpertRecord record_from_json(const std::string& line);

struct ImitationOptions {
  GradOptions grad;
  double max_skip_fraction = 0.1;
  bool parallel = true;
};

struct LossEval {
  double loss = 0.0;
  Vec grad;  // empty unless requested
  int evaluated = 0;
  int skipped = 0;
};

/// Mean over records of |U(theta; x_init) - U_expert|^2 / (T m), optionally
/// with its gradient in the selected block. Records whose solve fails are
/// skipped; more than max_skip_fraction skipped throws SolverError.
LossEval imitation_loss(const Problem& problem, const Params& theta_hat,
                        const ExpertDataset& data, std::span<const int> indices,
                        ParamBlock block, bool with_grad, const ImitationOptions& opts = {});

enum class LearnMode { kDx, kCost, kSysid };
LearnMode parse_learn_mode(const std::string& name);
std::string to_string(LearnMode mode);

struct TrainConfig {
  LearnMode mode = LearnMode::kDx;
  double learning_rate = 1e-2;
  double rms_decay = 0.5;      // squared-gradient averaging coefficient
  double rms_eps = 1e-8;
  double lr_decay = 1.0;       // per-epoch learning-rate multiplier
  int epochs = 500;
  int alternation_period = 10;  // cost mode: epochs per (weights | goal) phase
  double divergence_loss = 1e6;
  ImitationOptions imitation;
};

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0.0;
  double validation_loss = 0.0;
  double model_loss = 0.0;
  Vec theta;  // learned block after the epoch's update
};

struct TrainResult {
  std::vector<EpochRecord> history;  // entry 0 is the initialization
  Vec best_theta;
  int best_epoch = 0;
  double best_validation_loss = 0.0;
  double test_loss = 0.0;  // at the best checkpoint
  bool diverged = false;
  std::string stop_reason;  // empty when all epochs ran
};

/// Learned block per mode: dynamics for dx, cost for cost.
ParamBlock learned_block(LearnMode mode);

/// In cost mode, which entries an epoch may change (weights first).
std::vector<bool> cost_update_mask(int epoch, int period, int param_dim);

struct RmsProp {
  double lr;
  double decay;
  double eps;
  Vec mean_square;

  /// Entries with mask false are left untouched, including their average.
  void step(Vec& theta, const Vec& grad, const std::vector<bool>& mask);
};

TrainResult train(const Problem& problem, const ExpertDataset& data, const Params& init,
                  const Params& truth, const TrainConfig& config);

struct SysidOptions {
  int max_iter = 200;
  double tol = 1e-12;
  double rank_tol = 1e-8;  // relative singular-value threshold
};

struct SysidResult {
  Vec theta;
  int iterations = 0;
  double objective = 0.0;
  std::vector<double> history;
  int rank = 0;
  bool under_determined = false;
};

/// Sum over recorded transitions of |x_{t+1} - f(x_t, u_t, theta)|^2.
double sysid_objective(const Problem& problem, const ExpertDataset& data,
                       std::span<const int> indices, const Vec& theta);

/// Damped Gauss-Newton descent on sysid_objective using df/dtheta.
SysidResult sysid_fit(const Problem& problem, const ExpertDataset& data,
                      std::span<const int> indices, const Vec& theta_init,
                      const SysidOptions& opts = {});

/// MSE(theta - theta_hat).
double model_loss(const Vec& theta_hat, const Vec& theta_true);

/// Fraction of negative entries over all checkpoints and all listed
/// physical-parameter positions.
double bad_value_ratio(const std::vector<Vec>& checkpoints, const std::vector<int>& physical);

struct Metrics {
  std::vector<double> imitation_loss;
  std::vector<double> model_loss;
  double bad_value_ratio = 0.0;
};

/// Model loss per history entry and the bad-value ratio over `final_checkpoints`.
Metrics compute_metrics(const std::vector<Vec>& theta_history,
                        const std::vector<double>& imitation_history, const Vec& theta_true,
                        const std::vector<Vec>& final_checkpoints,
                        const std::vector<int>& physical);

}  // namespace ilqrgrad
