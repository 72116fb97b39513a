// Copyright 2026 The vertexdfl Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "vertexdfl/losses.hpp"

#include <cmath>
#include <string>

namespace vertexdfl {

EpsilonMargin::EpsilonMargin(double epsilon) : epsilon_(epsilon) {
  if (!(epsilon >= 0.0)) fail(ErrorCode::kInvalidArgument, "epsilon must be >= 0");
}

bool EpsilonMargin::is_infinite() const { return std::isinf(epsilon_); }

LossValueGrad lava_loss_from_differences(const Vector& c_hat, const Matrix& differences,
                                         EpsilonMargin eps, Sense sense) {
  if (differences.rows() == 0) {
    fail(ErrorCode::kInvalidArgument, "adjacent vertex set is empty");
  }
  if (differences.cols() != c_hat.size()) {
    fail(ErrorCode::kInvalidArgument, "cost length " + std::to_string(c_hat.size()) +
                                          " does not match vertex length " +
                                          std::to_string(differences.cols()));
  }
  const double sign = sense == Sense::kMax ? -1.0 : 1.0;
  const Vector margins = sign * (differences * c_hat);
  LossValueGrad out;
  out.grad = Vector::Zero(c_hat.size());
  const double floor = -eps.value();
  for (Eigen::Index k = 0; k < margins.size(); ++k) {
    if (eps.is_infinite() || margins(k) > floor) {
      out.value += margins(k);
      out.grad.noalias() += sign * differences.row(k).transpose();
    } else {
      out.value += floor;
    }
  }
  return out;
}

LossValueGrad lava_loss(const Vector& c_hat, const Vector& z_star, const Matrix& z_adj,
                        EpsilonMargin eps, Sense sense) {
  if (z_star.size() != c_hat.size() || z_adj.cols() != c_hat.size()) {
    fail(ErrorCode::kInvalidArgument, "lava_loss dimensions disagree");
  }
  const Matrix differences = (-z_adj).rowwise() + z_star.transpose();
  return lava_loss_from_differences(c_hat, differences, eps, sense);
}

LossValueGrad mse_loss(const Vector& c_hat, const Vector& c) {
  if (c_hat.size() != c.size() || c.size() == 0) {
    fail(ErrorCode::kInvalidArgument, "mse_loss needs equal, non-empty lengths");
  }
  const Vector diff = c_hat - c;
  const double n = static_cast<double>(c.size());
  return {diff.squaredNorm() / n, (2.0 / n) * diff};
}

LossValueGrad spo_plus_loss(SimplexSolver& solver, const Vector& c_hat, const Vector& c,
                            const Vector& z_star, const Basis* warm_start) {
  const StandardFormLP& lp = solver.lp();
  if (c_hat.size() != c.size()) fail(ErrorCode::kInvalidArgument, "c_hat and c lengths differ");
  const Eigen::Index len = c.size();
  if (z_star.size() != lp.cols()) fail(ErrorCode::kInvalidArgument, "z_star must be full length");
  const Vector probe = 2.0 * c_hat - c;
  const BasicFeasibleSolution tilde =
      warm_start != nullptr ? solver.solve(probe, *warm_start) : solver.solve(probe);
  // In min form (costs negated for max problems):
  //   value = -min_z (2c_hat - c)'z + 2 c_hat'z* - c'z*,  grad = 2 (z* - z~).
  const double sign = lp.original_sense == Sense::kMax ? -1.0 : 1.0;
  const Vector star = z_star.head(len);
  const Vector other = tilde.z.head(len);
  LossValueGrad out;
  out.value = sign * (-probe.dot(other) + 2.0 * c_hat.dot(star) - c.dot(star));
  out.grad = sign * 2.0 * (star - other);
  return out;
}

double regret(SimplexSolver& solver, const Vector& c_hat, const Vector& c) {
  const StandardFormLP& lp = solver.lp();
  const BasicFeasibleSolution decided = solver.solve(c_hat);
  const BasicFeasibleSolution best = solver.solve(c);
  return decision_regret(lp, c, decided.z, best.objective_value).regret;
}

DecisionOutcome decision_regret(const StandardFormLP& lp, const Vector& c, const Vector& decision,
                                double optimal_value) {
  DecisionOutcome out;
  out.achieved = user_objective(lp, c, decision);
  out.regret = lp.original_sense == Sense::kMax ? optimal_value - out.achieved
                                                : out.achieved - optimal_value;
  return out;
}

double normalized_regret(std::span<const DecisionOutcome> outcomes) {
  double total_regret = 0.0;
  double total_achieved = 0.0;
  for (const DecisionOutcome& o : outcomes) {
    total_regret += o.regret;
    total_achieved += o.achieved;
  }
  if (outcomes.empty() || total_achieved == 0.0) {
    fail(ErrorCode::kInvalidArgument,
         "normalized regret undefined: summed achieved objective is zero over " +
             std::to_string(outcomes.size()) + " instances");
  }
  return total_regret / total_achieved;
}

}  // namespace vertexdfl
