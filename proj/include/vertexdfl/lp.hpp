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

#ifndef VERTEXDFL_LP_HPP_
#define VERTEXDFL_LP_HPP_

#include <string>
#include <vector>

#include "vertexdfl/common.hpp"

namespace vertexdfl {

// Equality-form problem  min c'z  s.t.  Az = b, z >= 0.
//
// The first n_structural columns are the user's variables, any further
// columns are slacks (zero cost). Costs handed to the solver are in the
// user's sense; a max problem is negated at solve time, never here.
struct StandardFormLP {
  Matrix A;
  Vector b;
  int n_structural = 0;
  Sense original_sense = Sense::kMin;
  std::vector<std::string> names;

  int rows() const { return static_cast<int>(A.rows()); }
  int cols() const { return static_cast<int>(A.cols()); }
};

struct RankInfo {
  int rank = 0;
  std::vector<int> independent_rows;  // ascending
  std::vector<int> dependent_rows;    // ascending
};

// Numerical row rank via column-pivoted QR of A', with threshold
// rank_rel * (largest row norm).
RankInfo check_full_row_rank(const Matrix& A, double rank_rel = kTol.rank_rel);

// Appends one +1 slack per row of A_ineq z <= b_ineq.
StandardFormLP to_standard_form(const Matrix& A_ineq, const Vector& b_ineq, Sense sense,
                                std::vector<std::string> names = {});

// Builds an LP that is already in equality form. Linearly dependent rows are
// dropped with a logged warning; an inconsistent system is an error.
StandardFormLP make_equality_lp(const Matrix& A, const Vector& b, int n_structural, Sense sense,
                                std::vector<std::string> names = {});

// Throws kInvalidArgument on shape problems, kRankDeficient if A lost rank.
void validate(const StandardFormLP& lp);

// Extends a structural-length user cost with zero slack costs and flips the
// sign for max problems, giving the internal minimization cost.
Vector internal_cost(const StandardFormLP& lp, const Vector& user_cost);

// Objective in the user's sense for a full-length point z.
double user_objective(const StandardFormLP& lp, const Vector& user_cost, const Vector& z);

}  // namespace vertexdfl

#endif  // VERTEXDFL_LP_HPP_
