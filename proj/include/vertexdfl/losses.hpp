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

#ifndef VERTEXDFL_LOSSES_HPP_
#define VERTEXDFL_LOSSES_HPP_

#include <limits>
#include <span>
#include <vector>

#include "vertexdfl/common.hpp"
#include "vertexdfl/lp.hpp"
#include "vertexdfl/simplex.hpp"

namespace vertexdfl {

struct LossValueGrad {
  double value = 0.0;
  Vector grad;  // with respect to the predicted cost
};

// Hinge threshold of the adjacent-vertex loss. The infinite margin disables
// the hinge, leaving the raw objective differences.
class EpsilonMargin {
 public:
  explicit EpsilonMargin(double epsilon = 0.1);
  static EpsilonMargin infinite() { return EpsilonMargin(std::numeric_limits<double>::infinity()); }

  double value() const { return epsilon_; }
  bool is_infinite() const;

 private:
  double epsilon_;
};

// Adjacent-vertex alignment loss
//
//   sum_k max(c_hat'z_star - c_hat'z_adj_k, -eps)
//
// written for minimization; with Sense::kMax the cost is negated first.
// The gradient counts a term only when its margin is strictly above -eps,
// so the kink itself contributes zero. Never touches a solver.
LossValueGrad lava_loss(const Vector& c_hat, const Vector& z_star, const Matrix& z_adj,
                        EpsilonMargin eps, Sense sense = Sense::kMin);

// Same loss from precomputed rows (z_star - z_adj_k); the training loop keeps
// these restricted to the structural columns.
LossValueGrad lava_loss_from_differences(const Vector& c_hat, const Matrix& differences,
                                         EpsilonMargin eps, Sense sense = Sense::kMin);

// (1/n) ||c_hat - c||^2.
LossValueGrad mse_loss(const Vector& c_hat, const Vector& c);

// SPO+ with one solve on 2 c_hat - c. Costs are user-sense, structural or
// full length; z_star is the full-length optimum for c. An optional warm
// start basis (typically the optimal basis of c) speeds up the solve.
LossValueGrad spo_plus_loss(SimplexSolver& solver, const Vector& c_hat, const Vector& c,
                            const Vector& z_star, const Basis* warm_start = nullptr);

// c'z*(c_hat) - c'z*(c) for min problems, c'z*(c) - c'z*(c_hat) for max;
// always >= 0 up to tolerance.
double regret(SimplexSolver& solver, const Vector& c_hat, const Vector& c);

// Regret against a known true optimum, also returning the achieved objective.
struct DecisionOutcome {
  double regret = 0.0;
  double achieved = 0.0;  // c'z*(c_hat), user sense
};
DecisionOutcome decision_regret(const StandardFormLP& lp, const Vector& c, const Vector& decision,
                                double optimal_value);

// sum regret_i / sum achieved_i. Throws on a zero denominator.
double normalized_regret(std::span<const DecisionOutcome> outcomes);

}  // namespace vertexdfl

#endif  // VERTEXDFL_LOSSES_HPP_
