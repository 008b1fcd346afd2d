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

#include <cmath>

#include "ilqrgrad/learning.hpp"

namespace ilqrgrad {

LearnMode parse_learn_mode(const std::string& name) {
  if (name == "dx") return LearnMode::kDx;
  if (name == "cost") return LearnMode::kCost;
  if (name == "sysid") return LearnMode::kSysid;
  throw ConfigError("unknown learning mode '" + name + "' (expected dx, cost or sysid)");
}

std::string to_string(LearnMode mode) {
  switch (mode) {
    case LearnMode::kDx: return "dx";
    case LearnMode::kCost: return "cost";
    case LearnMode::kSysid: return "sysid";
  }
  return "dx";
}

ParamBlock learned_block(LearnMode mode) {
  return mode == LearnMode::kCost ? ParamBlock::kCost : ParamBlock::kDynamics;
}

std::vector<bool> cost_update_mask(int epoch, int period, int param_dim) {
  if (period < 1) throw ConfigError("alternation period must be positive");
  const bool weights_phase = ((epoch - 1) / period) % 2 == 0;
  std::vector<bool> mask(param_dim);
  for (int i = 0; i < param_dim; ++i) mask[i] = (i < param_dim / 2) == weights_phase;
  return mask;
}

void RmsProp::step(Vec& theta, const Vec& grad, const std::vector<bool>& mask) {
  if (mean_square.size() != theta.size()) mean_square = Vec::Zero(theta.size());
  for (int i = 0; i < theta.size(); ++i) {
    if (!mask[i]) continue;
    mean_square[i] = decay * mean_square[i] + (1.0 - decay) * grad[i] * grad[i];
    theta[i] -= lr * grad[i] / (std::sqrt(mean_square[i]) + eps);
  }
}

TrainResult train(const Problem& problem, const ExpertDataset& data, const Params& init,
                  const Params& truth, const TrainConfig& config) {
  if (config.mode == LearnMode::kSysid)
    throw ConfigError("train: sysid mode is fitted by sysid_fit");
  if (config.epochs < 0 || !(config.learning_rate >= 0.0) || !(config.rms_decay >= 0.0) ||
      !(config.rms_decay < 1.0))
    throw ConfigError("train: invalid epochs, learning rate or decay");
  if (data.split.train.empty() || data.split.validation.empty())
    throw ConfigError("train: dataset needs training and validation records");

  const ParamBlock block = learned_block(config.mode);
  const Vec truth_theta = truth.select(block);
  Vec theta = init.select(block);
  const int p = static_cast<int>(theta.size());
  RmsProp opt{config.learning_rate, config.rms_decay, config.rms_eps, Vec::Zero(p)};

  TrainResult out;
  out.best_validation_loss = INFINITY;
  for (int epoch = 0;; ++epoch) {
    const Params current = init.with(block, theta);
    LossEval tr, val;
    try {
      tr = imitation_loss(problem, current, data, data.split.train, block, true, config.imitation);
      val = imitation_loss(problem, current, data, data.split.validation, block, false,
                           config.imitation);
    } catch (const SolverError& e) {
      out.diverged = true;
      out.stop_reason = std::string("epoch ") + std::to_string(epoch) + ": " + e.what();
      break;
    }
    EpochRecord rec{epoch, tr.loss, val.loss, model_loss(theta, truth_theta), theta};
    out.history.push_back(rec);
    if (val.loss < out.best_validation_loss) {
      out.best_validation_loss = val.loss;
      out.best_theta = theta;
      out.best_epoch = epoch;
    }
    if (!std::isfinite(tr.loss) || tr.loss > config.divergence_loss || !tr.grad.allFinite()) {
      out.diverged = true;
      out.stop_reason = "epoch " + std::to_string(epoch) + ": training loss diverged";
      break;
    }
    if (epoch == config.epochs) break;

    const std::vector<bool> mask = config.mode == LearnMode::kCost
                                       ? cost_update_mask(epoch + 1, config.alternation_period, p)
                                       : std::vector<bool>(p, true);
    opt.step(theta, tr.grad, mask);
    opt.lr *= config.lr_decay;
  }

  if (out.best_theta.size() == 0) {
    out.best_theta = init.select(block);
    return out;
  }
  if (!data.split.test.empty()) {
    try {
      out.test_loss = imitation_loss(problem, init.with(block, out.best_theta), data,
                                     data.split.test, block, false, config.imitation)
                          .loss;
    } catch (const SolverError&) {
      out.test_loss = NAN;
    }
  }
  return out;
}

}  // namespace ilqrgrad
