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

#ifndef VERTEXDFL_ILP_HPP_
#define VERTEXDFL_ILP_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <string>

#include "vertexdfl/common.hpp"
#include "vertexdfl/simplex.hpp"

namespace vertexdfl {

struct IlpOptions {
  std::uint64_t node_limit = 200000;
  double integrality_tol = 1e-6;
  // Nodes whose bound is within this fraction of the incumbent are pruned.
  double relative_gap = 1e-4;
};

struct IlpResult {
  Vector z;                  // full-length standard-form point
  double objective_value = 0.0;  // user sense
  std::uint64_t nodes = 0;
};

// Thrown when the node limit is hit; carries the best incumbent found.
class NodeLimitError : public Error {
 public:
  NodeLimitError(const std::string& message, std::optional<IlpResult> incumbent);
  const std::optional<IlpResult>& incumbent() const { return incumbent_; }

 private:
  std::optional<IlpResult> incumbent_;
};

// Best-first branch and bound over the variables in binary_indices. The LP
// relaxation must already imply 0 <= z_i <= 1 for those variables. When
// every structural has its own bound row the bounds are handled implicitly
// by a bounded dual simplex; otherwise fixings become exact penalty costs on
// the solver's LP. Reduced-cost fixing and a rounding heuristic tighten the
// search. Increments ilp_solve_calls once.
IlpResult solve_binary_ilp(SimplexSolver& solver, const Vector& user_cost,
                           std::span<const int> binary_indices, IlpOptions options = {});

}  // namespace vertexdfl

#endif  // VERTEXDFL_ILP_HPP_
