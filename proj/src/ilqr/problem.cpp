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

#include "ilqrgrad/problem.hpp"

namespace ilqrgrad {

ParamBlock parse_param_block(const std::string& name) {
  if (name == "dynamics" || name == "dx") return ParamBlock::kDynamics;
  if (name == "cost") return ParamBlock::kCost;
  if (name == "all") return ParamBlock::kAll;
  throw ConfigError("unknown parameter block '" + name + "'");
}

std::string to_string(ParamBlock block) {
  switch (block) {
    case ParamBlock::kDynamics: return "dynamics";
    case ParamBlock::kCost: return "cost";
    case ParamBlock::kAll: return "all";
  }
  return "?";
}

Vec Params::select(ParamBlock block) const {
  switch (block) {
    case ParamBlock::kDynamics: return dynamics;
    case ParamBlock::kCost: return cost;
    case ParamBlock::kAll: {
      Vec all(dynamics.size() + cost.size());
      all << dynamics, cost;
      return all;
    }
  }
  return {};
}

Params Params::with(ParamBlock block, const Vec& values) const {
  if (values.size() != dim(block)) throw ConfigError("parameter vector has wrong length");
  Params out = *this;
  switch (block) {
    case ParamBlock::kDynamics: out.dynamics = values; break;
    case ParamBlock::kCost: out.cost = values; break;
    case ParamBlock::kAll:
      out.dynamics = values.head(dynamics.size());
      out.cost = values.tail(cost.size());
      break;
  }
  return out;
}

int Params::dim(ParamBlock block) const {
  switch (block) {
    case ParamBlock::kDynamics: return static_cast<int>(dynamics.size());
    case ParamBlock::kCost: return static_cast<int>(cost.size());
    case ParamBlock::kAll: return static_cast<int>(dynamics.size() + cost.size());
  }
  return 0;
}

Problem Problem::from_spec(const ModelSpec& spec, int horizon) {
  Problem p;
  p.dynamics = spec.dynamics;
  p.cost = spec.cost;
  p.horizon = horizon > 0 ? horizon : spec.default_horizon;
  p.u_lower = spec.u_lower;
  p.u_upper = spec.u_upper;
  return p;
}

void Problem::validate(const Params& params, const Vec& x_init) const {
  if (!dynamics || !cost) throw ConfigError("problem: missing dynamics or cost model");
  if (horizon < 2) throw ConfigError("problem: horizon must be at least 2");
  if (cost->state_dim() != state_dim() || cost->control_dim() != control_dim())
    throw ConfigError("problem: cost and dynamics dimensions differ");
  if (x_init.size() != state_dim()) throw ConfigError("problem: x_init has wrong length");
  if (u_lower.size() != control_dim() || u_upper.size() != control_dim())
    throw ConfigError("problem: bounds have wrong length");
  if ((u_lower.array() > u_upper.array()).any())
    throw ConfigError("problem: lower bound exceeds upper bound");
  if (params.dynamics.size() != dynamics->param_dim() ||
      params.cost.size() != cost->param_dim())
    throw ConfigError("problem: parameter vectors have wrong length");
  if (!params.dynamics.allFinite() || !params.cost.allFinite())
    throw ConfigError("problem: parameters must be finite");
}

Trajectory Problem::rollout(const Vec& x_init, const Mat& controls,
                            const Params& params) const {
  Trajectory traj{Mat(state_dim(), horizon), controls};
  traj.x.col(0) = x_init;
  for (int t = 0; t + 1 < horizon; ++t)
    traj.x.col(t + 1) = dynamics->step(traj.x.col(t), controls.col(t), params.dynamics);
  return traj;
}

double Problem::total_cost(const Trajectory& traj, const Params& params) const {
  double total = 0.0;
  for (int t = 0; t < horizon; ++t)
    total += cost->value(traj.x.col(t), traj.u.col(t), params.cost, t + 1);
  return total;
}

Mat Problem::clip_controls(const Mat& controls) const {
  Mat out = controls;
  for (int t = 0; t < out.cols(); ++t)
    out.col(t) = out.col(t).cwiseMax(u_lower).cwiseMin(u_upper);
  return out;
}

}  // namespace ilqrgrad
