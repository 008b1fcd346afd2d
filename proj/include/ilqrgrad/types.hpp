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

#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace ilqrgrad {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// A third-order tensor stored as one matrix per differentiated coordinate:
/// `slices[j]` is the partial derivative of the matrix with respect to the
/// j-th coordinate.
using MatSlices = std::vector<Mat>;

/// Bad dimensions, unknown model ids, malformed config files.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Non-finite values produced by a model evaluation.
class NumericError : public std::runtime_error {
 public:
  NumericError(const std::string& what, int time_index)
      : std::runtime_error(what + " (t=" + std::to_string(time_index) + ")"),
        time_index_(time_index) {}
  int time_index() const { return time_index_; }

 private:
  int time_index_;
};

/// A solver could not produce a usable answer (indefinite Hessian after
/// maximal regularization, singular fixed-point system, non-convergence).
class SolverError : public std::runtime_error {
 public:
  explicit SolverError(const std::string& what, int time_index = -1)
      : std::runtime_error(time_index >= 0
                               ? what + " (t=" + std::to_string(time_index) + ")"
                               : what),
        time_index_(time_index) {}
  int time_index() const { return time_index_; }

 private:
  int time_index_;
};

/// States and controls over a horizon; column t holds x_t / u_t.
struct Trajectory {
  Mat x;  // n x T
  Mat u;  // m x T

  int horizon() const { return static_cast<int>(u.cols()); }
  int state_dim() const { return static_cast<int>(x.rows()); }
  int control_dim() const { return static_cast<int>(u.rows()); }

  /// Column-major stacking (x_1, x_2, ..., x_T).
  Vec stacked_x() const { return x.reshaped(); }
  Vec stacked_u() const { return u.reshaped(); }
};

inline double max_abs(const Mat& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

/// Normwise relative error max|a-b| / max(max|b|, floor).
inline double relative_error(const Mat& a, const Mat& b, double floor = 1e-300) {
  return max_abs(a - b) / std::max(max_abs(b), floor);
}

}  // namespace ilqrgrad
