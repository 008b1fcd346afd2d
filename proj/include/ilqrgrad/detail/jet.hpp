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

#include <cmath>

#include <Eigen/Dense>

namespace ilqrgrad::detail {

/// Second-order forward-mode number over K independent variables: value,
/// gradient and full Hessian, propagated exactly through each operation.
template <int K>
struct Jet2 {
  using Grad = Eigen::Matrix<double, K, 1>;
  using Hess = Eigen::Matrix<double, K, K>;

  double v = 0.0;
  Grad g = Grad::Zero();
  Hess h = Hess::Zero();

  Jet2() = default;
  Jet2(double value) : v(value) {}  // NOLINT: constants promote implicitly

  static Jet2 variable(int index, double value) {
    Jet2 out(value);
    out.g[index] = 1.0;
    return out;
  }
};

template <int K>
Jet2<K> operator+(const Jet2<K>& a, const Jet2<K>& b) {
  Jet2<K> r;
  r.v = a.v + b.v;
  r.g = a.g + b.g;
  r.h = a.h + b.h;
  return r;
}

template <int K>
Jet2<K> operator-(const Jet2<K>& a, const Jet2<K>& b) {
  Jet2<K> r;
  r.v = a.v - b.v;
  r.g = a.g - b.g;
  r.h = a.h - b.h;
  return r;
}

template <int K>
Jet2<K> operator-(const Jet2<K>& a) {
  Jet2<K> r;
  r.v = -a.v;
  r.g = -a.g;
  r.h = -a.h;
  return r;
}

template <int K>
Jet2<K> operator*(const Jet2<K>& a, const Jet2<K>& b) {
  Jet2<K> r;
  r.v = a.v * b.v;
  r.g = a.v * b.g + b.v * a.g;
  r.h = a.v * b.h + b.v * a.h + a.g * b.g.transpose() + b.g * a.g.transpose();
  return r;
}

template <int K>
Jet2<K> reciprocal(const Jet2<K>& a) {
  const double inv = 1.0 / a.v;
  Jet2<K> r;
  r.v = inv;
  r.g = -inv * inv * a.g;
  r.h = -inv * inv * a.h + 2.0 * inv * inv * inv * (a.g * a.g.transpose());
  return r;
}

template <int K>
Jet2<K> operator/(const Jet2<K>& a, const Jet2<K>& b) {
  return a * reciprocal(b);
}

template <int K>
Jet2<K> operator*(double s, const Jet2<K>& a) {
  Jet2<K> r;
  r.v = s * a.v;
  r.g = s * a.g;
  r.h = s * a.h;
  return r;
}

template <int K>
Jet2<K> operator*(const Jet2<K>& a, double s) {
  return s * a;
}

template <int K>
Jet2<K> operator+(const Jet2<K>& a, double s) {
  Jet2<K> r = a;
  r.v += s;
  return r;
}

template <int K>
Jet2<K> operator+(double s, const Jet2<K>& a) {
  return a + s;
}

template <int K>
Jet2<K> operator-(double s, const Jet2<K>& a) {
  return (-a) + s;
}

template <int K>
Jet2<K> operator-(const Jet2<K>& a, double s) {
  return a + (-s);
}

template <int K>
Jet2<K> operator/(double s, const Jet2<K>& a) {
  return s * reciprocal(a);
}

template <int K>
Jet2<K> sin(const Jet2<K>& a) {
  const double s = std::sin(a.v), c = std::cos(a.v);
  Jet2<K> r;
  r.v = s;
  r.g = c * a.g;
  r.h = c * a.h - s * (a.g * a.g.transpose());
  return r;
}

template <int K>
Jet2<K> cos(const Jet2<K>& a) {
  const double s = std::sin(a.v), c = std::cos(a.v);
  Jet2<K> r;
  r.v = c;
  r.g = -s * a.g;
  r.h = -s * a.h - c * (a.g * a.g.transpose());
  return r;
}

}  // namespace ilqrgrad::detail
