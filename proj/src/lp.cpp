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

#include "vertexdfl/lp.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <spdlog/spdlog.h>

namespace vertexdfl {
namespace {

std::vector<std::string> default_names(int n_structural, int n) {
  std::vector<std::string> names;
  names.reserve(n);
  for (int j = 0; j < n; ++j) {
    names.push_back(j < n_structural ? "z" + std::to_string(j)
                                     : "s" + std::to_string(j - n_structural));
  }
  return names;
}

}  // namespace

RankInfo check_full_row_rank(const Matrix& A, double rank_rel) {
  RankInfo info;
  if (A.rows() == 0 || A.cols() == 0) {
    for (int i = 0; i < A.rows(); ++i) info.dependent_rows.push_back(i);
    return info;
  }
  // Columns of A' are rows of A, so the QR column permutation orders rows by
  // how much new direction they contribute. |R(0,0)| is the largest row norm.
  Eigen::ColPivHouseholderQR<Matrix> qr(A.transpose());
  qr.setThreshold(rank_rel);
  info.rank = static_cast<int>(qr.rank());
  const auto& perm = qr.colsPermutation().indices();
  std::vector<bool> independent(A.rows(), false);
  for (int k = 0; k < info.rank; ++k) independent[perm(k)] = true;
  for (int i = 0; i < A.rows(); ++i) {
    (independent[i] ? info.independent_rows : info.dependent_rows).push_back(i);
  }
  return info;
}

StandardFormLP to_standard_form(const Matrix& A_ineq, const Vector& b_ineq, Sense sense,
                                std::vector<std::string> names) {
  if (A_ineq.rows() != b_ineq.size()) {
    fail(ErrorCode::kInvalidArgument, "A_ineq has " + std::to_string(A_ineq.rows()) +
                                          " rows but b_ineq has " +
                                          std::to_string(b_ineq.size()) + " entries");
  }
  const int m = static_cast<int>(A_ineq.rows());
  const int n_structural = static_cast<int>(A_ineq.cols());
  StandardFormLP lp;
  lp.A.resize(m, n_structural + m);
  lp.A << A_ineq, Matrix::Identity(m, m);
  lp.b = b_ineq;
  lp.n_structural = n_structural;
  lp.original_sense = sense;
  if (names.empty()) {
    lp.names = default_names(n_structural, n_structural + m);
  } else {
    for (int i = 0; i < m; ++i) names.push_back("s" + std::to_string(i));
    lp.names = std::move(names);
  }
  validate(lp);
  return lp;
}

StandardFormLP make_equality_lp(const Matrix& A, const Vector& b, int n_structural, Sense sense,
                                std::vector<std::string> names) {
  if (A.rows() != b.size()) fail(ErrorCode::kInvalidArgument, "A and b row counts differ");
  const RankInfo rank = check_full_row_rank(A);
  StandardFormLP lp;
  lp.n_structural = n_structural;
  lp.original_sense = sense;
  lp.names = names.empty() ? default_names(n_structural, static_cast<int>(A.cols()))
                           : std::move(names);
  if (rank.dependent_rows.empty()) {
    lp.A = A;
    lp.b = b;
  } else {
    lp.A.resize(rank.rank, A.cols());
    lp.b.resize(rank.rank);
    for (int k = 0; k < rank.rank; ++k) {
      lp.A.row(k) = A.row(rank.independent_rows[k]);
      lp.b(k) = b(rank.independent_rows[k]);
    }
    // The dropped rows must be implied, otherwise the system is inconsistent.
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(lp.A.transpose());
    for (int i : rank.dependent_rows) {
      const Vector mult = cod.solve(A.row(i).transpose());
      const double implied = mult.dot(lp.b);
      if (std::abs(implied - b(i)) > kTol.feas * std::max(1.0, std::abs(b(i)))) {
        fail(ErrorCode::kInfeasible,
             "dependent row " + std::to_string(i) + " has an inconsistent right-hand side");
      }
    }
    spdlog::warn("dropped {} redundant equality row(s); rank {} of {}",
                 rank.dependent_rows.size(), rank.rank, A.rows());
  }
  validate(lp);
  return lp;
}

void validate(const StandardFormLP& lp) {
  const int m = lp.rows();
  const int n = lp.cols();
  if (lp.b.size() != m) fail(ErrorCode::kInvalidArgument, "b length does not match A rows");
  if (m > n) fail(ErrorCode::kRankDeficient, "more rows than columns");
  if (lp.n_structural < 0 || lp.n_structural > n) {
    fail(ErrorCode::kInvalidArgument, "n_structural out of range");
  }
  if (!lp.names.empty() && static_cast<int>(lp.names.size()) != n) {
    fail(ErrorCode::kInvalidArgument, "names length does not match column count");
  }
  if (!lp.A.allFinite() || !lp.b.allFinite()) fail(ErrorCode::kNonFinite, "non-finite LP data");
  const RankInfo rank = check_full_row_rank(lp.A);
  if (rank.rank < m) {
    fail(ErrorCode::kRankDeficient, "A has rank " + std::to_string(rank.rank) + " < " +
                                        std::to_string(m) + " rows");
  }
}

Vector internal_cost(const StandardFormLP& lp, const Vector& user_cost) {
  const int n = lp.cols();
  Vector c = Vector::Zero(n);
  if (user_cost.size() == n) {
    c = user_cost;
  } else if (user_cost.size() == lp.n_structural) {
    c.head(lp.n_structural) = user_cost;
  } else {
    fail(ErrorCode::kInvalidArgument, "cost length " + std::to_string(user_cost.size()) +
                                          " matches neither n=" + std::to_string(n) +
                                          " nor n_structural=" +
                                          std::to_string(lp.n_structural));
  }
  if (lp.original_sense == Sense::kMax) c = -c;
  return c;
}

double user_objective(const StandardFormLP& lp, const Vector& user_cost, const Vector& z) {
  if (user_cost.size() == lp.cols()) return user_cost.dot(z);
  return user_cost.dot(z.head(user_cost.size()));
}

}  // namespace vertexdfl
