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

#include "ilqrgrad/learning.hpp"

namespace ilqrgrad {

double model_loss(const Vec& theta_hat, const Vec& theta_true) {
  if (theta_hat.size() != theta_true.size() || theta_true.size() == 0)
    throw ConfigError("model loss: parameter length mismatch");
  return (theta_hat - theta_true).squaredNorm() / static_cast<double>(theta_true.size());
}

double bad_value_ratio(const std::vector<Vec>& checkpoints, const std::vector<int>& physical) {
  long total = 0, negative = 0;
  for (const Vec& theta : checkpoints) {
    for (int i : physical) {
      if (i < 0 || i >= theta.size()) throw ConfigError("bad-value ratio: index out of range");
      ++total;
      if (theta[i] < 0.0) ++negative;
    }
  }
  return total == 0 ? 0.0 : static_cast<double>(negative) / static_cast<double>(total);
}

Metrics compute_metrics(const std::vector<Vec>& theta_history,
                        const std::vector<double>& imitation_history, const Vec& theta_true,
                        const std::vector<Vec>& final_checkpoints,
                        const std::vector<int>& physical) {
  Metrics m;
  m.imitation_loss = imitation_history;
  m.model_loss.reserve(theta_history.size());
  for (const Vec& theta : theta_history) m.model_loss.push_back(model_loss(theta, theta_true));
  m.bad_value_ratio = bad_value_ratio(final_checkpoints, physical);
  return m;
}

}  // namespace ilqrgrad
