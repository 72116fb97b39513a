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

#ifndef VERTEXDFL_SIMPLEX_HPP_
#define VERTEXDFL_SIMPLEX_HPP_

#include <atomic>
#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/SparseCore>

#include "vertexdfl/common.hpp"
#include "vertexdfl/lp.hpp"

namespace vertexdfl {

struct Basis {
  std::vector<int> basic;     // position i holds the variable basic in row i
  std::vector<int> nonbasic;  // ascending

  // Completes the nonbasic set from the basic indices.
  static Basis from_basic(std::vector<int> basic, int n);

  bool operator==(const Basis&) const = default;
};

// Throws kInvalidArgument if basic/nonbasic do not partition {0..n-1}.
void check_partition(const Basis& basis, int n, int m);

struct BasicFeasibleSolution {
  Vector z;
  Basis basis;
  int sigma = 0;
  double objective_value = 0.0;  // user sense, for the cost it was solved with
};

int degeneracy_degree(const Vector& z, const Basis& basis, double tol_zero = kTol.zero);

// Counters are atomic so worker threads can share one sink.
struct SolveStats {
  std::atomic<std::uint64_t> lp_solve_calls{0};
  std::atomic<std::uint64_t> ilp_solve_calls{0};
  std::atomic<std::uint64_t> simplex_pivots{0};

  struct Snapshot {
    std::uint64_t lp_solve_calls = 0;
    std::uint64_t ilp_solve_calls = 0;
    std::uint64_t simplex_pivots = 0;
  };
  Snapshot snapshot() const;
};

struct SimplexOptions {
  // Dantzig pricing switches to Bland after this many consecutive pivots
  // without objective progress; <= 0 means 5 * (n + m).
  int bland_after_stalls = 0;
  // <= 0 means 50 * (n + m) + 1000.
  int max_pivots = 0;
  // The explicit inverse is rebuilt from an LU factorization this often.
  int refactor_every = 64;
};

// Dense revised simplex. Holds the current basis and its explicit inverse
// between calls so consecutive solves on the same LP warm-start: the
// feasible region never changes, so the previous optimal basis is always a
// feasible starting point. One instance per thread.
class SimplexSolver {
 public:
  explicit SimplexSolver(const StandardFormLP& lp, SolveStats* stats = nullptr,
                         SimplexOptions options = {});
  // The solver keeps a pointer to the LP, which must outlive it.
  SimplexSolver(StandardFormLP&&, SolveStats* = nullptr, SimplexOptions = {}) = delete;

  // Minimizes (max problems: maximizes) user_cost'z. user_cost has length
  // n_structural or n. Starts from the current basis, or runs Phase 1 if
  // there is none yet.
  BasicFeasibleSolution solve(const Vector& user_cost);

  // Same, starting from the given feasible basis.
  BasicFeasibleSolution solve(const Vector& user_cost, const Basis& warm_start);

  // Minimizes an internal (already min-sense, full-length) cost. Used by the
  // branch-and-bound layer. Does not count as an LP solve call.
  BasicFeasibleSolution solve_internal(const Vector& min_cost);

  // c_j - c_B' B^{-1} a_j for every column at the current basis (zero on
  // basic columns). min_cost is internal and full length.
  Vector reduced_costs(const Vector& min_cost) const;

  const StandardFormLP& lp() const { return *lp_; }
  SolveStats* stats() const { return stats_; }
  std::optional<Basis> current_basis() const;
  void reset();

 private:
  void phase_one();
  void load_basis(const std::vector<int>& basic);
  void refactor();
  void run(const Vector& cost);
  void pivot(int leaving_row, int entering, const Vector& column);
  BasicFeasibleSolution extract(const Vector& user_cost) const;

  const StandardFormLP* lp_;
  SolveStats* stats_;
  SimplexOptions options_;
  Eigen::SparseMatrix<double> columns_;
  const Eigen::SparseMatrix<double>* work_;  // columns_, or the Phase 1 extension
  std::vector<int> basic_;
  std::vector<int> position_;  // variable -> basic row, or -1
  Matrix basis_inverse_;
  Vector x_basic_;
  int pivots_since_refactor_ = 0;
  bool has_basis_ = false;
};

BasicFeasibleSolution solve_lp(const StandardFormLP& lp, const Vector& user_cost,
                               SolveStats* stats = nullptr);

// True when the factorized matrix is numerically singular. Eigen's rcond
// estimate alone misses exactly singular inputs, so the pivot spread of U
// is checked as well.
bool lu_is_singular(const Eigen::PartialPivLU<Matrix>& lu, double rcond_floor);

// z with z_B = B^{-1} b and zeros elsewhere; feasibility is not checked.
Vector basic_solution_from_basis(const StandardFormLP& lp, const Basis& basis);

}  // namespace vertexdfl

#endif  // VERTEXDFL_SIMPLEX_HPP_
