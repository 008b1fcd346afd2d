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

#include "ilqrgrad/models.hpp"

namespace ilqrgrad {

std::vector<std::string> DynamicsModel::param_names() const {
  std::vector<std::string> names;
  for (int k = 0; k < param_dim(); ++k) names.push_back("theta" + std::to_string(k));
  return names;
}

void DynamicsModel::check_dims(const Vec& x, const Vec& u, const Vec& theta) const {
  if (x.size() != state_dim() || u.size() != control_dim() ||
      theta.size() != param_dim()) {
    throw ConfigError(id() + ": dimension mismatch (x=" + std::to_string(x.size()) +
                      ", u=" + std::to_string(u.size()) +
                      ", theta=" + std::to_string(theta.size()) + ")");
  }
}

std::vector<std::string> CostModel::param_names() const {
  std::vector<std::string> names;
  for (int k = 0; k < param_dim(); ++k) names.push_back("cost" + std::to_string(k));
  return names;
}

}  // namespace ilqrgrad
