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

#include "vertexdfl/ilp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

namespace vertexdfl {

NodeLimitError::NodeLimitError(const std::string& message, std::optional<IlpResult> incumbent)
    : Error(ErrorCode::kNodeLimit, message), incumbent_(std::move(incumbent)) {}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Fixing {
  int variable;
  bool one;
};

struct Node {
  std::vector<Fixing> fixings;
  double parent_bound = -kInf;
  std::uint64_t order = 0;
};

// Best bound first; among equal bounds the most recently created node.
struct WorseNode {
  bool operator()(const Node& a, const Node& b) const {
    if (a.parent_bound != b.parent_bound) return a.parent_bound > b.parent_bound;
    return a.order < b.order;
  }
};

class OpenNodes {
 public:
  OpenNodes() { push({}); }
  bool empty() const { return heap_.empty(); }
  Node pop() {
    std::pop_heap(heap_.begin(), heap_.end(), WorseNode{});
    Node node = std::move(heap_.back());
    heap_.pop_back();
    return node;
  }
  void push(Node node) {
    node.order = ++created_;
    heap_.push_back(std::move(node));
    std::push_heap(heap_.begin(), heap_.end(), WorseNode{});
  }
  // Two children of a node with the given bound; the preferred one is
  // explored first among equals.
  void branch(Node node, int variable, bool prefer_one, double bound) {
    Node later = node;
    later.fixings.push_back({variable, !prefer_one});
    node.fixings.push_back({variable, prefer_one});
    later.parent_bound = node.parent_bound = bound;
    push(std::move(later));
    push(std::move(node));
  }

 private:
  std::vector<Node> heap_;
  std::uint64_t created_ = 0;
};

// Inequality form: structural columns followed by an identity slack block.
bool has_slack_block(const StandardFormLP& lp) {
  const int m = lp.rows();
  const int ns = lp.n_structural;
  if (lp.cols() != ns + m) return false;
  return lp.A.rightCols(m).isIdentity(0.0);
}

int most_fractional(const Vector& z, std::span<const int> binary, double tol) {
  int branch = -1;
  double best = tol;
  for (int j : binary) {
    const double frac = std::min(z(j) - std::floor(z(j)), std::ceil(z(j)) - z(j));
    if (frac > best) {
      best = frac;
      branch = j;
    }
  }
  return branch;
}

// Rounding heuristic for inequality-form LPs with nonnegative binary
// columns: round fractional binaries down, then add binaries greedily by
// cost per unit of relative resource use while slacks stay >= 0.
class Rounder {
 public:
  Rounder(const StandardFormLP& lp, std::span<const int> binary, const Vector& internal)
      : lp_(lp) {
    applicable_ = has_slack_block(lp);
    for (int j : binary) applicable_ = applicable_ && lp.A.col(j).minCoeff() >= 0.0;
    if (!applicable_) return;
    columns_ = lp.A.leftCols(lp.n_structural).sparseView();
    std::vector<double> score(lp.n_structural, 0.0);
    for (int j : binary) {
      double use = 0.0;
      for (int r = 0; r < lp.rows(); ++r) use += lp.A(r, j) / std::max(lp.b(r), 1e-9);
      score[j] = internal(j) / std::max(use, 1e-12);
      if (internal(j) < 0.0) order_.push_back(j);
    }
    std::sort(order_.begin(), order_.end(), [&](int a, int b) { return score[a] < score[b]; });
    binary_.assign(binary.begin(), binary.end());
  }

  bool applicable() const { return applicable_; }

  // relaxed holds at least the structural values.
  std::optional<Vector> round(const Vector& relaxed, double tol) const {
    const int ns = lp_.n_structural;
    Vector z = relaxed.head(ns);
    for (int j : binary_) z(j) = z(j) < 1.0 - tol ? 0.0 : 1.0;
    Vector slack = lp_.b - columns_ * z;
    if (slack.minCoeff() < -kTol.feas) return std::nullopt;
    for (int j : order_) {
      if (z(j) == 1.0) continue;
      bool fits = true;
      for (Eigen::SparseMatrix<double>::InnerIterator it(columns_, j); it && fits; ++it) {
        fits = slack(it.row()) - it.value() >= -kTol.feas;
      }
      if (!fits) continue;
      for (Eigen::SparseMatrix<double>::InnerIterator it(columns_, j); it; ++it) {
        slack(it.row()) -= it.value();
      }
      z(j) = 1.0;
    }
    Vector full(lp_.cols());
    full << z, slack.cwiseMax(0.0);
    return full;
  }

 private:
  const StandardFormLP& lp_;
  std::vector<int> binary_;
  std::vector<int> order_;  // improving binaries, best score first
  bool applicable_ = false;
  Eigen::SparseMatrix<double> columns_;
};

// Shared incumbent bookkeeping (internal min sense).
struct Incumbent {
  std::optional<IlpResult> best;
  double value = kInf;
  double relative_gap = 0.0;

  double prune_level() const {
    if (!best) return kInf;
    return value - std::max(kTol.obj * std::max(1.0, std::abs(value)), relative_gap * std::abs(value));
  }
  void offer(const StandardFormLP& lp, const Vector& user_cost, Vector z, double internal_value) {
    if (internal_value >= value) return;
    value = internal_value;
    IlpResult result;
    result.objective_value = user_objective(lp, user_cost, z);
    result.z = std::move(z);
    best = std::move(result);
  }
};

[[noreturn]] void node_limit(const IlpOptions& options, Incumbent& incumbent,
                             std::uint64_t nodes) {
  if (incumbent.best) incumbent.best->nodes = nodes;
  throw NodeLimitError(
      "branch and bound exceeded " + std::to_string(options.node_limit) + " nodes",
      incumbent.best);
}

// ---------------------------------------------------------------------------
// Boxed path. When every structural column has an explicit bound row
// z_j + s = u_j, those rows are dropped and z_j <= u_j becomes a variable
// bound. Node LPs then only carry the remaining rows and are solved by a
// bounded dual simplex, where a fixing is just a bound change.

struct BoxedForm {
  std::vector<int> rows;  // original rows kept as constraints
  Matrix A;               // kept rows x (structural + kept slacks)
  Vector b;
  Vector lower, upper;    // per column of A
};

std::optional<BoxedForm> detect_boxed(const StandardFormLP& lp) {
  if (!has_slack_block(lp)) return std::nullopt;
  const int m = lp.rows();
  const int ns = lp.n_structural;
  Vector upper = Vector::Constant(ns, kInf);
  std::vector<char> bound_row(m, 0);
  for (int r = 0; r < m; ++r) {
    int only = -1;
    int count = 0;
    for (int j = 0; j < ns; ++j) {
      if (lp.A(r, j) != 0.0) {
        only = j;
        ++count;
      }
    }
    if (count == 1 && lp.A(r, only) > 0.0 && lp.b(r) >= 0.0) {
      upper(only) = std::min(upper(only), lp.b(r) / lp.A(r, only));
      bound_row[r] = 1;
    }
  }
  if (!upper.allFinite()) return std::nullopt;

  BoxedForm form;
  for (int r = 0; r < m; ++r) {
    if (!bound_row[r]) form.rows.push_back(r);
  }
  const int kept = static_cast<int>(form.rows.size());
  form.A = Matrix::Zero(kept, ns + kept);
  form.b.resize(kept);
  form.lower = Vector::Zero(ns + kept);
  form.upper.resize(ns + kept);
  form.upper.head(ns) = upper;
  for (int i = 0; i < kept; ++i) {
    const int r = form.rows[i];
    form.A.row(i).head(ns) = lp.A.row(r).head(ns);
    form.A(i, ns + i) = 1.0;
    form.b(i) = lp.b(r);
    // Implied slack bound from the boxed structurals.
    double slack_max = lp.b(r);
    for (int j = 0; j < ns; ++j) slack_max -= std::min(lp.A(r, j) * upper(j), 0.0);
    form.upper(ns + i) = std::max(slack_max, 0.0);
  }
  return form;
}

// Dual simplex for min c'x s.t. Ax = b, lower <= x <= upper with every
// variable boxed, so any basis is dual feasible once nonbasic variables sit
// at the bound matching their reduced-cost sign.
class BoxedDualSimplex {
 public:
  enum class Status { kOptimal, kInfeasible };

  explicit BoxedDualSimplex(const BoxedForm& form) : form_(form) {
    const int m = static_cast<int>(form.A.rows());
    const int n = static_cast<int>(form.A.cols());
    basic_.resize(m);
    for (int i = 0; i < m; ++i) basic_[i] = n - m + i;
    at_upper_.assign(n, 0);
  }

  Status solve(const Vector& cost, const Vector& lower, const Vector& upper,
               std::uint64_t* pivots) {
    const int m = static_cast<int>(form_.A.rows());
    const int n = static_cast<int>(form_.A.cols());
    std::vector<char> is_basic(n, 0);
    for (int v : basic_) is_basic[v] = 1;
    const int bland_after = 50 * (n + m);
    const int max_iterations = 500 * (n + m) + 1000;
    x_.resize(n);
    B_.resize(m, m);
    Vector y(m), x_basic(m), rho(m), alpha(n), rhs(m);
    for (int iteration = 0;; ++iteration) {
      if (iteration > max_iterations) {
        fail(ErrorCode::kMaxPivotsExceeded, "bounded dual simplex did not converge");
      }
      const bool bland = iteration > bland_after;
      for (int i = 0; i < m; ++i) B_.col(i) = form_.A.col(basic_[i]);
      lu_.compute(B_);
      const auto& lu = lu_;
      for (int i = 0; i < m; ++i) rho(i) = cost(basic_[i]);
      y.noalias() = lu.transpose().solve(rho);
      reduced_.noalias() = cost - form_.A.transpose() * y;
      for (int j = 0; j < n; ++j) {
        if (is_basic[j]) {
          reduced_(j) = 0.0;
          continue;
        }
        if (reduced_(j) > kTol.reduced_cost) at_upper_[j] = 0;
        if (reduced_(j) < -kTol.reduced_cost) at_upper_[j] = 1;
        x_(j) = at_upper_[j] ? upper(j) : lower(j);
      }
      rhs = form_.b;
      for (int j = 0; j < n; ++j) {
        if (!is_basic[j] && x_(j) != 0.0) rhs -= x_(j) * form_.A.col(j);
      }
      x_basic.noalias() = lu.solve(rhs);
      for (int i = 0; i < m; ++i) x_(basic_[i]) = x_basic(i);

      int leave = -1;
      double worst = kTol.feas;
      for (int i = 0; i < m; ++i) {
        const int v = basic_[i];
        const double violation = std::max(lower(v) - x_(v), x_(v) - upper(v));
        if (violation <= kTol.feas) continue;
        if (bland ? (leave < 0 || v < basic_[leave]) : violation > worst) {
          worst = violation;
          leave = i;
        }
      }
      if (leave < 0) return Status::kOptimal;

      const int leaving = basic_[leave];
      const bool below = x_(leaving) < lower(leaving);
      x_basic.setZero();
      x_basic(leave) = 1.0;
      rho.noalias() = lu.transpose().solve(x_basic);
      alpha.noalias() = form_.A.transpose() * rho;
      int enter = -1;
      double best_ratio = kInf;
      double best_alpha = 0.0;
      for (int j = 0; j < n; ++j) {
        if (is_basic[j] || upper(j) - lower(j) <= 0.0) continue;
        const double a = alpha(j);
        const bool eligible = below ? (at_upper_[j] ? a > kTol.zero : a < -kTol.zero)
                                    : (at_upper_[j] ? a < -kTol.zero : a > kTol.zero);
        if (!eligible) continue;
        const double ratio = std::abs(reduced_(j)) / std::abs(a);
        const bool better = ratio < best_ratio - kTol.ratio ||
                            (ratio <= best_ratio + kTol.ratio &&
                             (bland ? j < enter : std::abs(a) > best_alpha));
        if (better) {
          best_ratio = std::min(ratio, best_ratio);
          best_alpha = std::abs(a);
          enter = j;
        }
      }
      if (enter < 0) return Status::kInfeasible;
      basic_[leave] = enter;
      is_basic[enter] = 1;
      is_basic[leaving] = 0;
      at_upper_[leaving] = below ? 0 : 1;
      if (pivots != nullptr) ++*pivots;
    }
  }

  const Vector& x() const { return x_; }
  const Vector& reduced() const { return reduced_; }
  bool at_upper(int j) const { return at_upper_[j]; }
  bool is_nonbasic(int j) const { return std::find(basic_.begin(), basic_.end(), j) == basic_.end(); }

 private:
  const BoxedForm& form_;
  std::vector<int> basic_;
  std::vector<char> at_upper_;
  Matrix B_;
  Eigen::PartialPivLU<Matrix> lu_;
  Vector x_;
  Vector reduced_;
};

IlpResult solve_boxed(const StandardFormLP& lp, const BoxedForm& form, SolveStats* stats,
                      const Vector& user_cost, std::span<const int> binary,
                      const IlpOptions& options) {
  const int ns = lp.n_structural;
  const int n = static_cast<int>(form.A.cols());
  const Vector base = internal_cost(lp, user_cost);
  Vector cost = Vector::Zero(n);
  cost.head(ns) = base.head(ns);
  const Rounder rounder(lp, binary, base);
  const auto full_point = [&](const Vector& x) {
    Vector z(lp.cols());
    z.head(ns) = x.head(ns);
    z.tail(lp.rows()) = lp.b - lp.A.leftCols(ns) * z.head(ns);
    return z;
  };

  BoxedDualSimplex simplex(form);
  Incumbent incumbent;
  incumbent.relative_gap = options.relative_gap;
  OpenNodes open;
  std::uint64_t nodes = 0;
  std::uint64_t pivots = 0;
  Vector lower(n), upper(n);

  while (!open.empty()) {
    Node node = open.pop();
    if (node.parent_bound >= incumbent.prune_level()) continue;
    if (++nodes > options.node_limit) {
      if (stats != nullptr) stats->simplex_pivots.fetch_add(pivots, std::memory_order_relaxed);
      node_limit(options, incumbent, nodes - 1);
    }
    lower = form.lower;
    upper = form.upper;
    for (const Fixing& f : node.fixings) lower(f.variable) = upper(f.variable) = f.one ? 1.0 : 0.0;
    const auto status = simplex.solve(cost, lower, upper, &pivots);
    if (status == BoxedDualSimplex::Status::kInfeasible) continue;
    const Vector& x = simplex.x();
    const double bound = cost.dot(x);
    if (bound >= incumbent.prune_level()) continue;

    const int branch = most_fractional(x, binary, options.integrality_tol);
    if (branch < 0) {
      Vector z = full_point(x);
      for (int j : binary) z(j) = std::round(z(j));
      incumbent.offer(lp, user_cost, std::move(z), bound);
      continue;
    }
    if (rounder.applicable()) {
      if (auto rounded = rounder.round(x, options.integrality_tol)) {
        incumbent.offer(lp, user_cost, *rounded, base.dot(*rounded));
        if (bound >= incumbent.prune_level()) continue;
      }
    }
    // Reduced-cost fixing: a binary whose move off its bound costs at least
    // the remaining gap keeps that value in every improving descendant.
    if (incumbent.best) {
      const double gap = incumbent.prune_level() - bound;
      const Vector& d = simplex.reduced();
      for (int j : binary) {
        if (j == branch || lower(j) == upper(j) || !simplex.is_nonbasic(j)) continue;
        if (!simplex.at_upper(j) && d(j) >= gap) node.fixings.push_back({j, false});
        if (simplex.at_upper(j) && -d(j) >= gap) node.fixings.push_back({j, true});
      }
    }
    open.branch(std::move(node), branch, x(branch) >= 0.5, bound);
  }
  if (stats != nullptr) stats->simplex_pivots.fetch_add(pivots, std::memory_order_relaxed);
  if (!incumbent.best) fail(ErrorCode::kInfeasible, "no binary-feasible point exists");
  incumbent.best->nodes = nodes;
  return *incumbent.best;
}

// ---------------------------------------------------------------------------
// General path: fixings are imposed through exact-penalty costs on the full
// standard form, so every node warm-starts from the solver's last basis.

IlpResult solve_with_penalties(SimplexSolver& solver, const Vector& user_cost,
                               std::span<const int> binary, const IlpOptions& options) {
  const StandardFormLP& lp = solver.lp();
  const Vector base = internal_cost(lp, user_cost);
  // Large against the cost scale, small enough that reduced costs keep ~6
  // significant digits in double.
  const double penalty = 1e4 * (1.0 + base.cwiseAbs().maxCoeff());
  const Rounder rounder(lp, binary, base);

  Incumbent incumbent;
  incumbent.relative_gap = options.relative_gap;
  OpenNodes open;
  std::uint64_t nodes = 0;
  Vector cost(base.size());

  while (!open.empty()) {
    Node node = open.pop();
    if (node.parent_bound >= incumbent.prune_level()) continue;
    if (++nodes > options.node_limit) node_limit(options, incumbent, nodes - 1);
    cost = base;
    for (const Fixing& f : node.fixings) cost(f.variable) += f.one ? -penalty : penalty;
    const BasicFeasibleSolution relaxed = solver.solve_internal(cost);

    bool consistent = true;
    for (const Fixing& f : node.fixings) {
      const double v = relaxed.z(f.variable);
      if (f.one ? v < 1.0 - options.integrality_tol : v > options.integrality_tol) {
        consistent = false;
        break;
      }
    }
    if (!consistent) continue;
    const double bound = base.dot(relaxed.z);
    if (bound >= incumbent.prune_level()) continue;

    const int branch = most_fractional(relaxed.z, binary, options.integrality_tol);
    if (branch < 0) {
      Vector z = relaxed.z;
      for (int j : binary) z(j) = std::round(z(j));
      incumbent.offer(lp, user_cost, std::move(z), bound);
      continue;
    }
    if (rounder.applicable()) {
      if (auto rounded = rounder.round(relaxed.z, options.integrality_tol)) {
        incumbent.offer(lp, user_cost, *rounded, base.dot(*rounded));
        if (bound >= incumbent.prune_level()) continue;
      }
    }
    if (incumbent.best) {
      const Vector reduced = solver.reduced_costs(cost);
      const double gap = incumbent.prune_level() - bound;
      for (int j : binary) {
        if (j == branch) continue;
        const bool already = std::any_of(node.fixings.begin(), node.fixings.end(),
                                         [j](const Fixing& f) { return f.variable == j; });
        if (!already && relaxed.z(j) <= options.integrality_tol && reduced(j) >= gap) {
          node.fixings.push_back({j, false});
        }
      }
    }
    open.branch(std::move(node), branch, relaxed.z(branch) >= 0.5, bound);
  }

  if (!incumbent.best) fail(ErrorCode::kInfeasible, "no binary-feasible point exists");
  incumbent.best->nodes = nodes;
  return *incumbent.best;
}

}  // namespace

IlpResult solve_binary_ilp(SimplexSolver& solver, const Vector& user_cost,
                           std::span<const int> binary_indices, IlpOptions options) {
  const StandardFormLP& lp = solver.lp();
  for (int j : binary_indices) {
    if (j < 0 || j >= lp.n_structural) {
      fail(ErrorCode::kInvalidArgument, "binary index " + std::to_string(j) + " is not structural");
    }
  }
  if (solver.stats() != nullptr) {
    solver.stats()->ilp_solve_calls.fetch_add(1, std::memory_order_relaxed);
  }
  if (auto form = detect_boxed(lp)) {
    bool unit_boxes = true;
    for (int j : binary_indices) unit_boxes = unit_boxes && form->upper(j) == 1.0;
    if (unit_boxes) {
      return solve_boxed(lp, *form, solver.stats(), user_cost, binary_indices, options);
    }
  }
  return solve_with_penalties(solver, user_cost, binary_indices, options);
}

}  // namespace vertexdfl
