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

#include <numbers>

#include "ilqrgrad/models.hpp"

namespace ilqrgrad {

std::vector<std::string> model_ids() { return {"pendulum", "cartpole", "linear-test"}; }

ModelSpec make_model_spec(const std::string& id) {
  ModelSpec spec;
  spec.id = id;
  if (id == "pendulum") {
    auto dyn = std::make_shared<Pendulum>(0.05);
    spec.dyn_params = dyn->default_params();
    spec.dynamics = dyn;
    spec.cost = std::make_shared<GoalCost>(2, 1);
    spec.cost_params = GoalCost::pack(Vec{{1.0, 0.1, 0.1}}, Vec{{std::numbers::pi, 0.0, 0.0}});
    spec.u_lower = Vec::Constant(1, -2.0);
    spec.u_upper = Vec::Constant(1, 2.0);
    spec.init_low = Vec{{-std::numbers::pi, -1.0}};
    spec.init_high = Vec{{std::numbers::pi, 1.0}};
    spec.default_horizon = 10;
  } else if (id == "cartpole") {
    auto dyn = std::make_shared<CartPole>(0.05);
    spec.dyn_params = dyn->default_params();
    spec.dynamics = dyn;
    spec.cost = std::make_shared<GoalCost>(4, 1);
    spec.cost_params =
        GoalCost::pack(Vec{{1.0, 0.1, 1.0, 0.1, 0.01}}, Vec::Zero(5));
    spec.u_lower = Vec::Constant(1, -10.0);
    spec.u_upper = Vec::Constant(1, 10.0);
    spec.init_low = Vec{{-1.0, 0.0, -0.3, 0.0}};
    spec.init_high = Vec{{1.0, 0.0, 0.3, 0.0}};
    spec.default_horizon = 20;
  } else if (id == "linear-test") {
    auto dyn = std::make_shared<LinearTestDynamics>(LinearTestDynamics::oscillator(0.1));
    spec.dyn_params = dyn->default_params();
    spec.dynamics = dyn;
    spec.cost = std::make_shared<GoalCost>(2, 1);
    spec.cost_params = GoalCost::pack(Vec{{1.0, 0.1, 0.1}}, Vec{{1.0, 0.0, 0.0}});
    spec.u_lower = Vec::Constant(1, -100.0);
    spec.u_upper = Vec::Constant(1, 100.0);
    spec.init_low = Vec{{-1.0, -1.0}};
    spec.init_high = Vec{{1.0, 1.0}};
    spec.default_horizon = 10;
  } else {
    throw ConfigError("unknown model id '" + id + "'");
  }
  return spec;
}

}  // namespace ilqrgrad
