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

#include <memory>

#include "ilqrgrad/models.hpp"

namespace ilqrgrad {

/// Which parameters a gradient is taken with respect to.
enum class ParamBlock { kDynamics, kCost, kAll };

ParamBlock parse_param_block(const std::string& name);
std::string to_string(ParamBlock block);

/// Dynamics parameters and cost parameters of one problem instance.
struct Params {
  Vec dynamics;
  Vec cost;

  /// The differentiated vector: dynamics, cost, or (dynamics, cost).
  Vec select(ParamBlock block) const;
  Params with(ParamBlock block, const Vec& values) const;
  int dim(ParamBlock block) const;
};

/// A trajectory-optimization problem: models, horizon and control box.
struct Problem {
  std::shared_ptr<const DynamicsModel> dynamics;
  std::shared_ptr<const CostModel> cost;
  int horizon = 0;
  Vec u_lower;
  Vec u_upper;

  static Problem from_spec(const ModelSpec& spec, int horizon);

  int state_dim() const { return dynamics->state_dim(); }
  int control_dim() const { return dynamics->control_dim(); }

  /// Throws ConfigError on any inconsistency.
  void validate(const Params& params, const Vec& x_init) const;

  Trajectory rollout(const Vec& x_init, const Mat& controls, const Params& params) const;
  double total_cost(const Trajectory& traj, const Params& params) const;
  Mat clip_controls(const Mat& controls) const;
};

}  // namespace ilqrgrad
