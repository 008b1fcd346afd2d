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

#include <exception>

#include "ilqrgrad/learning.hpp"

namespace ilqrgrad {

LossEval imitation_loss(const Problem& problem, const Params& theta_hat,
                        const ExpertDataset& data, std::span<const int> indices,
                        ParamBlock block, bool with_grad, const ImitationOptions& opts) {
  const int count = static_cast<int>(indices.size());
  if (count == 0) throw ConfigError("imitation loss over an empty record set");
  const int m = problem.control_dim();
  const int p = theta_hat.dim(block);
  for (int idx : indices) {
    if (idx < 0 || idx >= static_cast<int>(data.records.size()))
      throw ConfigError("imitation loss: record index out of range");
    const ExpertRecord& rec = data.records[idx];
    if (rec.T != problem.horizon || rec.U.rows() != m || rec.U.cols() != rec.T)
      throw ConfigError("imitation loss: record shape does not match the problem");
  }

  GradOptions gopts = opts.grad;
  gopts.block = block;
  std::vector<double> losses(count, 0.0);
  std::vector<Vec> grads(count);
  std::vector<char> ok(count, 0);
  std::vector<std::exception_ptr> fatal(count);

#pragma omp parallel for schedule(dynamic) if (opts.parallel)
  for (int k = 0; k < count; ++k) {
    const ExpertRecord& rec = data.records[indices[k]];
    try {
      const double scale = 1.0 / (static_cast<double>(rec.T) * m);
      if (with_grad) {
        const GradResult g = grad_trajectory(problem, rec.x_init, theta_hat, gopts);
        const Mat diff = g.ilqr.traj.u - rec.U;
        losses[k] = diff.squaredNorm() * scale;
        const Vec dU = (2.0 * scale) * diff.reshaped();
        grads[k] = vjp(Vec::Zero(g.sens.dX.rows()), dU, g.sens);
      } else {
        const IlqrResult r = ilqr_solve(problem, rec.x_init, theta_hat, gopts.ilqr);
        if (!r.converged) continue;
        losses[k] = (r.traj.u - rec.U).squaredNorm() * scale;
      }
      ok[k] = 1;
    } catch (const SolverError&) {
    } catch (const NumericError&) {
    } catch (...) {
      fatal[k] = std::current_exception();
    }
  }
  for (const auto& e : fatal)
    if (e) std::rethrow_exception(e);

  LossEval out;
  if (with_grad) out.grad = Vec::Zero(p);
  for (int k = 0; k < count; ++k) {
    if (!ok[k]) {
      ++out.skipped;
      continue;
    }
    ++out.evaluated;
    out.loss += losses[k];
    if (with_grad) out.grad += grads[k];
  }
  if (out.skipped > opts.max_skip_fraction * count || out.evaluated == 0)
    throw SolverError("imitation loss: " + std::to_string(out.skipped) + " of " +
                      std::to_string(count) + " records failed to converge");
  out.loss /= out.evaluated;
  if (with_grad) out.grad /= out.evaluated;
  return out;
}

}  // namespace ilqrgrad
