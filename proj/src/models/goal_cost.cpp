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

Vec GoalCost::pack(const Vec& weights, const Vec& goal) {
  if (weights.size() != goal.size())
    throw ConfigError("goal cost: weights and goal differ in length");
  Vec theta(weights.size() + goal.size());
  theta << weights, goal;
  return theta;
}

std::vector<std::string> GoalCost::param_names() const {
  std::vector<std::string> names;
  for (int i = 0; i < n_ + m_; ++i) names.push_back("w" + std::to_string(i));
  for (int i = 0; i < n_ + m_; ++i) names.push_back("goal" + std::to_string(i));
  return names;
}

void GoalCost::check(const Vec& x, const Vec& u, const Vec& theta) const {
  if (x.size() != n_ || u.size() != m_ || theta.size() != param_dim())
    throw ConfigError("goal cost: dimension mismatch");
}

double GoalCost::value(const Vec& x, const Vec& u, const Vec& theta, int) const {
  check(x, u, theta);
  const int k = n_ + m_;
  Vec tau(k);
  tau << x, u;
  const Vec diff = tau - theta.tail(k);
  return 0.5 * (theta.head(k).array() * diff.array().square()).sum();
}

CostEval GoalCost::eval(const Vec& x, const Vec& u, const Vec& theta, int t) const {
  check(x, u, theta);
  const int k = n_ + m_;
  Vec tau(k);
  tau << x, u;
  const Vec w = theta.head(k);
  const Vec diff = tau - theta.tail(k);

  CostEval ev;
  ev.value = 0.5 * (w.array() * diff.array().square()).sum();
  ev.c = w.cwiseProduct(diff);
  ev.C = w.asDiagonal();
  if (!std::isfinite(ev.value) || !ev.c.allFinite())
    throw NumericError("goal cost: non-finite expansion", t);

  const Mat zero = Mat::Zero(k, k);
  ev.dC_dtheta.assign(2 * k, zero);
  ev.dc_dtheta = Mat::Zero(k, 2 * k);
  for (int i = 0; i < k; ++i) {
    ev.dC_dtheta[i](i, i) = 1.0;
    ev.dc_dtheta(i, i) = diff[i];
    ev.dc_dtheta(i, k + i) = -w[i];
  }
  ev.dC_dx.assign(n_, zero);
  ev.dC_du.assign(m_, zero);
  return ev;
}

}  // namespace ilqrgrad
