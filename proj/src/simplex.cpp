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

#include "vertexdfl/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

namespace vertexdfl {
namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kSingularRcond = 1e-13;

}  // namespace

Basis Basis::from_basic(std::vector<int> basic, int n) {
  Basis basis;
  std::vector<bool> in_basis(n, false);
  for (int j : basic) {
    if (j < 0 || j >= n || in_basis[j]) {
      fail(ErrorCode::kInvalidArgument, "basic index " + std::to_string(j) + " invalid or repeated");
    }
    in_basis[j] = true;
  }
  basis.basic = std::move(basic);
  basis.nonbasic.reserve(n - basis.basic.size());
  for (int j = 0; j < n; ++j) {
    if (!in_basis[j]) basis.nonbasic.push_back(j);
  }
  return basis;
}

void check_partition(const Basis& basis, int n, int m) {
  if (static_cast<int>(basis.basic.size()) != m ||
      static_cast<int>(basis.nonbasic.size()) != n - m) {
    fail(ErrorCode::kInvalidArgument, "basis sizes do not match the LP");
  }
  std::vector<int> seen(n, 0);
  for (int j : basis.basic) {
    if (j < 0 || j >= n || seen[j]++) fail(ErrorCode::kInvalidArgument, "basis is not a partition");
  }
  for (int j : basis.nonbasic) {
    if (j < 0 || j >= n || seen[j]++) fail(ErrorCode::kInvalidArgument, "basis is not a partition");
  }
}

int degeneracy_degree(const Vector& z, const Basis& basis, double tol_zero) {
  int sigma = 0;
  for (int j : basis.basic) {
    if (z(j) <= tol_zero) ++sigma;
  }
  return sigma;
}

SolveStats::Snapshot SolveStats::snapshot() const {
  return {lp_solve_calls.load(), ilp_solve_calls.load(), simplex_pivots.load()};
}

SimplexSolver::SimplexSolver(const StandardFormLP& lp, SolveStats* stats, SimplexOptions options)
    : lp_(&lp), stats_(stats), options_(options), columns_(lp.A.sparseView()), work_(&columns_) {
  if (lp.b.size() != lp.rows() || lp.rows() > lp.cols()) {
    fail(ErrorCode::kInvalidArgument, "malformed standard-form LP");
  }
  const int size = lp.rows() + lp.cols();
  if (options_.bland_after_stalls <= 0) options_.bland_after_stalls = 5 * size;
  if (options_.max_pivots <= 0) options_.max_pivots = 50 * size + 1000;
  columns_.makeCompressed();
}

std::optional<Basis> SimplexSolver::current_basis() const {
  if (!has_basis_) return std::nullopt;
  return Basis::from_basic(basic_, lp_->cols());
}

void SimplexSolver::reset() {
  has_basis_ = false;
  basic_.clear();
  work_ = &columns_;
}

void SimplexSolver::refactor() {
  const int m = lp_->rows();
  Matrix B(m, m);
  for (int i = 0; i < m; ++i) B.col(i) = work_->col(basic_[i]);
  Eigen::PartialPivLU<Matrix> lu(B);
  if (m > 0 && lu_is_singular(lu, kSingularRcond)) {
    fail(ErrorCode::kSingularBasis, "basis matrix is numerically singular");
  }
  basis_inverse_ = lu.inverse();
  x_basic_ = basis_inverse_ * lp_->b;
  pivots_since_refactor_ = 0;
}

void SimplexSolver::load_basis(const std::vector<int>& basic) {
  const int n = lp_->cols();
  if (has_basis_ && basic == basic_ && work_ == &columns_) return;
  check_partition(Basis::from_basic(basic, n), n, lp_->rows());
  work_ = &columns_;
  basic_ = basic;
  position_.assign(n, -1);
  for (int i = 0; i < static_cast<int>(basic_.size()); ++i) position_[basic_[i]] = i;
  has_basis_ = false;
  refactor();
  has_basis_ = true;
}

void SimplexSolver::pivot(int leaving_row, int entering, const Vector& column) {
  const double theta = std::max(x_basic_(leaving_row), 0.0) / column(leaving_row);
  const Eigen::RowVectorXd pivot_row = basis_inverse_.row(leaving_row) / column(leaving_row);
  basis_inverse_.noalias() -= column * pivot_row;
  basis_inverse_.row(leaving_row) = pivot_row;
  x_basic_ -= theta * column;
  x_basic_(leaving_row) = theta;
  position_[basic_[leaving_row]] = -1;
  basic_[leaving_row] = entering;
  position_[entering] = leaving_row;
  ++pivots_since_refactor_;
  if (stats_ != nullptr) stats_->simplex_pivots.fetch_add(1, std::memory_order_relaxed);
}

void SimplexSolver::run(const Vector& cost) {
  const int m = lp_->rows();
  const int n_work = static_cast<int>(work_->cols());
  Vector cost_basic(m);
  Vector duals(m);
  Vector column(m);
  int stalls = 0;
  bool bland = false;
  for (int pivots = 0;; ++pivots) {
    if (pivots > options_.max_pivots) {
      fail(ErrorCode::kMaxPivotsExceeded,
           "no optimum after " + std::to_string(options_.max_pivots) + " pivots (m=" +
               std::to_string(m) + ", n=" + std::to_string(n_work) + ", stalls=" +
               std::to_string(stalls) + ")");
    }
    if (pivots_since_refactor_ >= options_.refactor_every) refactor();
    for (int i = 0; i < m; ++i) cost_basic(i) = cost(basic_[i]);
    duals.noalias() = basis_inverse_.transpose() * cost_basic;

    // Pricing: Dantzig, or Bland (first improving index) while stalling.
    int entering = -1;
    double best = -kTol.reduced_cost;
    for (int j = 0; j < n_work; ++j) {
      if (position_[j] >= 0) continue;
      const double reduced = cost(j) - work_->col(j).dot(duals);
      if (reduced < best) {
        best = reduced;
        entering = j;
        if (bland) break;
      }
    }
    if (entering < 0) return;

    column.setZero();
    for (Eigen::SparseMatrix<double>::InnerIterator it(*work_, entering); it; ++it) {
      column.noalias() += it.value() * basis_inverse_.col(it.row());
    }

    int leaving = -1;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m; ++i) {
      if (column(i) <= kPivotTol) continue;
      const double ratio = std::max(x_basic_(i), 0.0) / column(i);
      const double slack = 1e-12 * std::max(1.0, best_ratio == std::numeric_limits<double>::infinity()
                                                     ? 1.0
                                                     : best_ratio);
      if (leaving < 0 || ratio < best_ratio - slack) {
        leaving = i;
        best_ratio = ratio;
      } else if (ratio <= best_ratio + slack) {
        const bool better = bland ? basic_[i] < basic_[leaving] : column(i) > column(leaving);
        if (better) {
          leaving = i;
          best_ratio = std::min(best_ratio, ratio);
        }
      }
    }
    if (leaving < 0) {
      fail(ErrorCode::kUnbounded, "unbounded ray along variable " + std::to_string(entering));
    }

    const double objective = cost_basic.dot(x_basic_);
    const bool progress = best_ratio * (-best) > 1e-12 * std::max(1.0, std::abs(objective));
    pivot(leaving, entering, column);
    if (progress) {
      stalls = 0;
      bland = false;
    } else if (++stalls >= options_.bland_after_stalls) {
      bland = true;
    }
  }
}

void SimplexSolver::phase_one() {
  const int m = lp_->rows();
  const int n = lp_->cols();
  const Vector& b = lp_->b;

  // A column with a single positive entry in a row with b_i >= 0 can start
  // basic in that row; every other row gets an artificial variable.
  std::vector<int> start(m, -1);
  for (int j = 0; j < n; ++j) {
    if (columns_.col(j).nonZeros() != 1) continue;
    Eigen::SparseMatrix<double>::InnerIterator it(columns_, j);
    const int row = static_cast<int>(it.row());
    if (it.value() > 0.0 && b(row) >= 0.0 && start[row] < 0) start[row] = j;
  }
  std::vector<int> missing;
  for (int i = 0; i < m; ++i) {
    if (start[i] < 0) missing.push_back(i);
  }

  if (missing.empty()) {
    basic_ = start;
    position_.assign(n, -1);
    for (int i = 0; i < m; ++i) position_[basic_[i]] = i;
    work_ = &columns_;
    refactor();
    has_basis_ = true;
    return;
  }

  const int n_art = static_cast<int>(missing.size());
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(columns_.nonZeros() + n_art);
  for (int j = 0; j < n; ++j) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(columns_, j); it; ++it) {
      triplets.emplace_back(static_cast<int>(it.row()), j, it.value());
    }
  }
  for (int k = 0; k < n_art; ++k) {
    triplets.emplace_back(missing[k], n + k, b(missing[k]) >= 0.0 ? 1.0 : -1.0);
    start[missing[k]] = n + k;
  }
  Eigen::SparseMatrix<double> extended(m, n + n_art);
  extended.setFromTriplets(triplets.begin(), triplets.end());

  try {
    work_ = &extended;
    basic_ = start;
    position_.assign(n + n_art, -1);
    for (int i = 0; i < m; ++i) position_[basic_[i]] = i;
    refactor();

    Vector cost = Vector::Zero(n + n_art);
    cost.tail(n_art).setOnes();
    run(cost);

    double infeasibility = 0.0;
    for (int i = 0; i < m; ++i) {
      if (basic_[i] >= n) infeasibility += std::max(x_basic_(i), 0.0);
    }
    const double scale = std::max(1.0, b.cwiseAbs().maxCoeff());
    if (infeasibility > kTol.feas * scale) {
      fail(ErrorCode::kInfeasible,
           "Phase 1 ended with artificial mass " + std::to_string(infeasibility));
    }

    // Artificials left in the basis sit at zero; swap each for an original
    // column with a usable entry in its row of B^{-1}A.
    Vector column(m);
    for (int i = 0; i < m; ++i) {
      if (basic_[i] < n) continue;
      int best_j = -1;
      double best_abs = 1e-9;
      for (int j = 0; j < n; ++j) {
        if (position_[j] >= 0) continue;
        const double entry = std::abs(columns_.col(j).dot(basis_inverse_.row(i).transpose()));
        if (entry > best_abs) {
          best_abs = entry;
          best_j = j;
        }
      }
      if (best_j < 0) fail(ErrorCode::kRankDeficient, "row " + std::to_string(i) + " is redundant");
      column.setZero();
      for (Eigen::SparseMatrix<double>::InnerIterator it(columns_, best_j); it; ++it) {
        column.noalias() += it.value() * basis_inverse_.col(it.row());
      }
      x_basic_(i) = 0.0;
      pivot(i, best_j, column);
    }
  } catch (...) {
    work_ = &columns_;
    has_basis_ = false;
    throw;
  }
  work_ = &columns_;
  position_.resize(n);
  refactor();
  has_basis_ = true;
}

BasicFeasibleSolution SimplexSolver::extract(const Vector& user_cost) const {
  const int n = lp_->cols();
  BasicFeasibleSolution bfs;
  bfs.z = Vector::Zero(n);
  for (int i = 0; i < static_cast<int>(basic_.size()); ++i) {
    const double value = x_basic_(i);
    bfs.z(basic_[i]) = value <= kTol.zero ? 0.0 : value;
  }
  bfs.basis = Basis::from_basic(basic_, n);
  bfs.sigma = degeneracy_degree(bfs.z, bfs.basis);
  bfs.objective_value = user_cost.size() > 0 ? user_objective(*lp_, user_cost, bfs.z) : 0.0;
  return bfs;
}

BasicFeasibleSolution SimplexSolver::solve(const Vector& user_cost) {
  const Vector cost = internal_cost(*lp_, user_cost);
  if (!has_basis_) phase_one();
  run(cost);
  if (stats_ != nullptr) stats_->lp_solve_calls.fetch_add(1, std::memory_order_relaxed);
  return extract(user_cost);
}

BasicFeasibleSolution SimplexSolver::solve(const Vector& user_cost, const Basis& warm_start) {
  const Vector cost = internal_cost(*lp_, user_cost);
  load_basis(warm_start.basic);
  if (x_basic_.size() > 0 && x_basic_.minCoeff() < -kTol.feas) {
    has_basis_ = false;
    fail(ErrorCode::kInvalidArgument, "warm-start basis is not primal feasible");
  }
  run(cost);
  if (stats_ != nullptr) stats_->lp_solve_calls.fetch_add(1, std::memory_order_relaxed);
  return extract(user_cost);
}

BasicFeasibleSolution SimplexSolver::solve_internal(const Vector& min_cost) {
  if (min_cost.size() != lp_->cols()) {
    fail(ErrorCode::kInvalidArgument, "internal cost must have full length");
  }
  if (!has_basis_) phase_one();
  run(min_cost);
  return extract(Vector());
}

Vector SimplexSolver::reduced_costs(const Vector& min_cost) const {
  if (!has_basis_) fail(ErrorCode::kContractViolation, "reduced costs need a current basis");
  const int m = lp_->rows();
  Vector cost_basic(m);
  for (int i = 0; i < m; ++i) cost_basic(i) = min_cost(basic_[i]);
  const Vector duals = basis_inverse_.transpose() * cost_basic;
  Vector reduced = min_cost - columns_.transpose() * duals;
  for (int i = 0; i < m; ++i) reduced(basic_[i]) = 0.0;
  return reduced;
}

BasicFeasibleSolution solve_lp(const StandardFormLP& lp, const Vector& user_cost,
                               SolveStats* stats) {
  SimplexSolver solver(lp, stats);
  return solver.solve(user_cost);
}

bool lu_is_singular(const Eigen::PartialPivLU<Matrix>& lu, double rcond_floor) {
  if (lu.rows() == 0) return false;
  const Vector pivots = lu.matrixLU().diagonal().cwiseAbs();
  const double largest = pivots.maxCoeff();
  if (!(largest > 0.0) || !(pivots.minCoeff() > rcond_floor * largest)) return true;
  return !(lu.rcond() > rcond_floor);
}

Vector basic_solution_from_basis(const StandardFormLP& lp, const Basis& basis) {
  const int m = lp.rows();
  check_partition(basis, lp.cols(), m);
  Matrix B(m, m);
  for (int i = 0; i < m; ++i) B.col(i) = lp.A.col(basis.basic[i]);
  Eigen::PartialPivLU<Matrix> lu(B);
  if (m > 0 && lu_is_singular(lu, kSingularRcond)) {
    fail(ErrorCode::kSingularBasis, "basis columns are linearly dependent");
  }
  const Vector x_basic = lu.solve(lp.b);
  Vector z = Vector::Zero(lp.cols());
  for (int i = 0; i < m; ++i) z(basis.basic[i]) = x_basic(i);
  return z;
}

}  // namespace vertexdfl
