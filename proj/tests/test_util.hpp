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

#include <random>

#include "ilqrgrad/ilqr.hpp"

namespace ilqrgrad::testing {

inline Vec uniform(std::mt19937_64& rng, int n, double lo, double hi) {
  std::uniform_real_distribution<double> d(lo, hi);
  Vec v(n);
  for (int i = 0; i < n; ++i) v[i] = d(rng);
  return v;
}

inline Mat uniform(std::mt19937_64& rng, int r, int c, double lo, double hi) {
  std::uniform_real_distribution<double> d(lo, hi);
  Mat m(r, c);
  for (int j = 0; j < c; ++j)
    for (int i = 0; i < r; ++i) m(i, j) = d(rng);
  return m;
}

/// Central difference of a vector-valued function along each coordinate.
template <typename F>
Mat fd_jacobian(const F& f, const Vec& at, double rel = 1e-6) {
  const Vec f0 = f(at);
  Mat J(f0.size(), at.size());
  for (int j = 0; j < at.size(); ++j) {
    const double h = rel * (1.0 + std::abs(at[j]));
    Vec a = at, b = at;
    a[j] += h;
    b[j] -= h;
    J.col(j) = (f(a) - f(b)) / (2.0 * h);
  }
  return J;
}

inline Vec flatten(const Trajectory& t) {
  Vec v(t.x.size() + t.u.size());
  v << t.stacked_x(), t.stacked_u();
  return v;
}

inline Trajectory unflatten(const Vec& v, int n, int m, int T) {
  Trajectory t;
  t.x = v.head(n * T).reshaped(n, T);
  t.u = v.tail(m * T).reshaped(m, T);
  return t;
}

}  // namespace ilqrgrad::testing
