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

#include "vertexdfl/adjacency.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <random>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>

#include <spdlog/spdlog.h>

namespace vertexdfl {
namespace {

constexpr double kSingularRcond = 1e-12;

Matrix basis_matrix(const StandardFormLP& lp, const Basis& basis) {
  const int m = lp.rows();
  Matrix B(m, m);
  for (int i = 0; i < m; ++i) B.col(i) = lp.A.col(basis.basic[i]);
  return B;
}

Eigen::PartialPivLU<Matrix> factor(const StandardFormLP& lp, const Basis& basis) {
  Eigen::PartialPivLU<Matrix> lu(basis_matrix(lp, basis));
  if (lp.rows() > 0 && lu_is_singular(lu, kSingularRcond)) {
    fail(ErrorCode::kSingularBasis, "basis matrix is numerically singular");
  }
  return lu;
}

Matrix nonbasic_matrix(const StandardFormLP& lp, const Basis& basis) {
  Matrix N(lp.rows(), basis.nonbasic.size());
  for (std::size_t q = 0; q < basis.nonbasic.size(); ++q) N.col(q) = lp.A.col(basis.nonbasic[q]);
  return N;
}

Basis swap_pivot(const Basis& basis, int leaving_position, int entering_position) {
  Basis next = basis;
  const int leaving = basis.basic[leaving_position];
  next.basic[leaving_position] = basis.nonbasic[entering_position];
  next.nonbasic[entering_position] = leaving;
  std::sort(next.nonbasic.begin(), next.nonbasic.end());
  return next;
}

int nonbasic_position(const Basis& basis, int variable) {
  const auto it = std::lower_bound(basis.nonbasic.begin(), basis.nonbasic.end(), variable);
  if (it == basis.nonbasic.end() || *it != variable) return -1;
  return static_cast<int>(it - basis.nonbasic.begin());
}

// theta* > 0 without throwing on unbounded columns.
bool leaves_vertex(const Vector& z, const Basis& basis, const Eigen::Ref<const Vector>& d) {
  return min_ratio_test(z, basis, d).theta_star > kTol.ratio;
}

std::uint64_t default_cap(const StandardFormLP& lp, int sigma) {
  const double bound = 10.0 * min_bases_bound(lp.cols() - lp.rows(), sigma);
  if (!(bound < 1e18)) return std::numeric_limits<std::uint64_t>::max();
  return std::max<std::uint64_t>(64, static_cast<std::uint64_t>(std::ceil(bound)));
}

Vector snap(Vector v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) <= kTol.zero) v(i) = 0.0;
  }
  return v;
}

// Collects vertices, merging any two within tol_vertex_dedup (infinity norm).
class VertexCollector {
 public:
  explicit VertexCollector(int n) : n_(n) {}

  void add(const Vector& v) {
    const auto key = grid_key(v);
    auto [it, inserted] = buckets_.try_emplace(key, vertices_.size());
    if (inserted) vertices_.push_back(v);
  }

  Matrix finish() {
    // Grid keys can split two near-identical points across a cell boundary,
    // so finish with an exact pass. Points within tol in every coordinate
    // project within ||r||_1 * tol onto any direction r, so after sorting by
    // the projection only a narrow window needs comparing. r is a fixed
    // generic direction: coordinate sums are often constant on a polytope
    // (every z_i + s_i = 1 row pins one), which would make the window span
    // all points.
    Vector r(n_);
    std::mt19937_64 rng(0x5eed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (int i = 0; i < n_; ++i) r(i) = unit(rng);
    const double window = kTol.vertex_dedup * r.lpNorm<1>();
    std::vector<std::pair<double, std::size_t>> order;
    for (std::size_t i = 0; i < vertices_.size(); ++i) order.emplace_back(r.dot(vertices_[i]), i);
    std::sort(order.begin(), order.end());
    std::vector<char> dropped(vertices_.size(), 0);
    for (std::size_t a = 0; a < order.size(); ++a) {
      const std::size_t i = order[a].second;
      if (dropped[i]) continue;
      for (std::size_t b = a + 1; b < order.size() && order[b].first - order[a].first <= window;
           ++b) {
        const std::size_t j = order[b].second;
        if (!dropped[j] && (vertices_[i] - vertices_[j]).cwiseAbs().maxCoeff() <= kTol.vertex_dedup) {
          dropped[std::max(i, j)] = 1;
          if (j < i) break;
        }
      }
    }
    std::vector<Vector> unique;
    for (std::size_t i = 0; i < vertices_.size(); ++i) {
      if (!dropped[i]) unique.push_back(vertices_[i]);
    }
    Matrix out(unique.size(), n_);
    for (std::size_t r = 0; r < unique.size(); ++r) out.row(r) = unique[r].transpose();
    return out;
  }

 private:
  struct KeyHash {
    std::size_t operator()(const std::vector<long long>& key) const noexcept {
      std::size_t h = 1469598103934665603ull;
      for (long long k : key) h = (h ^ static_cast<std::size_t>(k)) * 1099511628211ull;
      return h;
    }
  };

  static std::vector<long long> grid_key(const Vector& v) {
    std::vector<long long> key(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) key[i] = std::llround(v(i) * 1e6);
    return key;
  }

  int n_;
  std::vector<Vector> vertices_;
  std::unordered_map<std::vector<long long>, std::size_t, KeyHash> buckets_;
};

}  // namespace

PivotDirectionMatrix compute_directions(const StandardFormLP& lp, const Basis& basis) {
  check_partition(basis, lp.cols(), lp.rows());
  const auto lu = factor(lp, basis);
  return {-lu.solve(nonbasic_matrix(lp, basis))};
}

double direction_residual(const StandardFormLP& lp, const Basis& basis,
                          const PivotDirectionMatrix& directions) {
  const Matrix residual = basis_matrix(lp, basis) * directions.D + nonbasic_matrix(lp, basis);
  return residual.size() == 0 ? 0.0 : residual.cwiseAbs().maxCoeff();
}

RatioTest min_ratio_test(const Vector& z, const Basis& basis,
                         const Eigen::Ref<const Vector>& direction) {
  RatioTest result;
  result.theta_star = std::numeric_limits<double>::infinity();
  const int m = static_cast<int>(basis.basic.size());
  for (int i = 0; i < m; ++i) {
    if (direction(i) >= -kTol.zero) continue;
    const double ratio = -std::max(z(basis.basic[i]), 0.0) / direction(i);
    if (ratio < result.theta_star) result.theta_star = ratio;
  }
  if (std::isinf(result.theta_star)) {
    fail(ErrorCode::kUnboundedEdge, "edge direction has no decreasing basic variable");
  }
  for (int i = 0; i < m; ++i) {
    if (direction(i) >= -kTol.zero) continue;
    const double ratio = -std::max(z(basis.basic[i]), 0.0) / direction(i);
    if (ratio <= result.theta_star + kTol.ratio) result.argmin.push_back(i);
  }
  return result;
}

int tnp_select_leaving(const PivotDirectionMatrix& directions, int t, int j,
                       std::span<const int> argmin, const Basis& basis) {
  if (argmin.empty()) fail(ErrorCode::kContractViolation, "empty argmin set");
  if (t == j) fail(ErrorCode::kContractViolation, "transition column cannot enter");
  const Matrix& D = directions.D;
  int best = -1;
  double best_ratio = -std::numeric_limits<double>::infinity();
  for (int k : argmin) {
    if (D(k, j) >= -kTol.zero) {
      fail(ErrorCode::kContractViolation,
           "argmin position " + std::to_string(k) + " has a non-decreasing direction");
    }
    const double ratio = D(k, t) / D(k, j);
    const double slack = 1e-12 * std::max(1.0, std::abs(ratio));
    if (best < 0 || ratio > best_ratio + slack ||
        (ratio >= best_ratio - slack && basis.basic[k] < basis.basic[best])) {
      best = k;
      best_ratio = ratio;
    }
  }
  return best;
}

BasisKey::BasisKey(const Basis& basis) : sorted_basic(basis.basic) {
  std::sort(sorted_basic.begin(), sorted_basic.end());
}

std::size_t BasisKeyHash::operator()(const BasisKey& key) const noexcept {
  std::size_t h = 1469598103934665603ull;
  for (int j : key.sorted_basic) h = (h ^ static_cast<std::size_t>(j)) * 1099511628211ull;
  return h;
}

double min_bases_bound(int dimension, int sigma) {
  if (sigma <= 0) return 1.0;
  return std::ldexp(1.0, sigma - 1) * static_cast<double>(dimension - sigma + 2);
}

Basis find_transition_basis(const StandardFormLP& lp, const BasicFeasibleSolution& bfs,
                            AdjacencyOptions options) {
  const std::uint64_t cap = options.max_bases > 0 ? options.max_bases : default_cap(lp, bfs.sigma);
  const Vector& z = bfs.z;
  // Every bounded edge leaves a nondegenerate vertex.
  if (degeneracy_degree(z, bfs.basis) == 0) return bfs.basis;
  std::deque<Basis> queue{bfs.basis};
  std::unordered_set<BasisKey, BasisKeyHash> visited{BasisKey(bfs.basis)};

  while (!queue.empty()) {
    Basis basis = std::move(queue.front());
    queue.pop_front();
    const auto lu = factor(lp, basis);
    const Matrix D = -lu.solve(nonbasic_matrix(lp, basis));
    for (Eigen::Index q = 0; q < D.cols(); ++q) {
      if (leaves_vertex(z, basis, D.col(q))) return basis;
    }
    // Internal node: every pivot is a zero step. Pick the leaving row by the
    // lexicographic rule on rows of B^{-1} scaled by the pivot entry.
    const Matrix inverse = lu.inverse();
    for (Eigen::Index q = 0; q < D.cols(); ++q) {
      const RatioTest test = min_ratio_test(z, basis, D.col(q));
      int leaving = test.argmin.front();
      for (int k : test.argmin) {
        for (Eigen::Index c = 0; c < inverse.cols(); ++c) {
          const double a = inverse(k, c) / -D(k, q);
          const double b = inverse(leaving, c) / -D(leaving, q);
          if (std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b))) continue;
          if (a < b) leaving = k;
          break;
        }
      }
      Basis next = swap_pivot(basis, leaving, static_cast<int>(q));
      if (visited.insert(BasisKey(next)).second) {
        if (visited.size() > cap) {
          fail(ErrorCode::kExplorationCapExceeded,
               "no transition basis within " + std::to_string(cap) + " bases");
        }
        queue.push_back(std::move(next));
      }
    }
  }
  fail(ErrorCode::kNoTransitionNode, "vertex has no basis with a nondegenerate pivot");
}

AdjacencySet enumerate_adjacent_vertices(const StandardFormLP& lp,
                                         const BasicFeasibleSolution& bfs,
                                         AdjacencyOptions options) {
  const int n = lp.cols();
  const std::uint64_t cap = options.max_bases > 0 ? options.max_bases : default_cap(lp, bfs.sigma);
  const Vector& z = bfs.z;

  const Basis start = find_transition_basis(lp, bfs, options);
  int transition = -1;  // tracked by variable index, chosen at the start basis

  VertexCollector collector(n);
  std::deque<Basis> queue{start};
  std::unordered_set<BasisKey, BasisKeyHash> visited{BasisKey(start)};

  while (!queue.empty()) {
    const Basis basis = std::move(queue.front());
    queue.pop_front();
    const PivotDirectionMatrix dirs = compute_directions(lp, basis);
    const Matrix& D = dirs.D;

    int t = nonbasic_position(basis, transition);
    if (transition < 0) {
      for (Eigen::Index q = 0; q < D.cols() && t < 0; ++q) {
        if (leaves_vertex(z, basis, D.col(q))) t = static_cast<int>(q);
      }
      if (t >= 0) transition = basis.nonbasic[t];
    } else if (t < 0 || !leaves_vertex(z, basis, D.col(t))) {
      // Round-off broke the transition column; re-anchor on any column that
      // still leaves the vertex from this basis.
      t = -1;
      for (Eigen::Index q = 0; q < D.cols() && t < 0; ++q) {
        if (leaves_vertex(z, basis, D.col(q))) t = static_cast<int>(q);
      }
      spdlog::warn("transition column {} lost; re-anchored on {}", transition,
                   t < 0 ? -1 : basis.nonbasic[t]);
      if (t >= 0) transition = basis.nonbasic[t];
    }

    for (Eigen::Index q = 0; q < D.cols(); ++q) {
      const RatioTest test = min_ratio_test(z, basis, D.col(q));
      if (test.theta_star > kTol.ratio) {
        Vector neighbor = z;
        neighbor(basis.nonbasic[q]) += test.theta_star;
        for (std::size_t k = 0; k < basis.basic.size(); ++k) {
          neighbor(basis.basic[k]) += test.theta_star * D(k, q);
        }
        collector.add(snap(std::move(neighbor)));
        continue;
      }
      int leaving;
      if (t >= 0) {
        leaving = tnp_select_leaving(dirs, t, static_cast<int>(q), test.argmin, basis);
      } else {
        leaving = *std::min_element(test.argmin.begin(), test.argmin.end(),
                                    [&](int a, int b) { return basis.basic[a] < basis.basic[b]; });
      }
      Basis next = swap_pivot(basis, leaving, static_cast<int>(q));
      if (visited.insert(BasisKey(next)).second) {
        if (visited.size() > cap) {
          fail(ErrorCode::kExplorationCapExceeded,
               "visited " + std::to_string(visited.size()) + " bases, cap " +
                   std::to_string(cap) + " (sigma=" + std::to_string(bfs.sigma) + ")");
        }
        queue.push_back(std::move(next));
      }
    }
  }

  AdjacencySet result;
  result.vertex = z;
  result.adjacent = collector.finish();
  result.bases_visited = visited.size();
  result.sigma = bfs.sigma;
  return result;
}

int VertexGraph::find(const Vector& z) const {
  for (std::size_t v = 0; v < vertices.size(); ++v) {
    if ((vertices[v] - z).cwiseAbs().maxCoeff() <= kTol.vertex_dedup) return static_cast<int>(v);
  }
  return -1;
}

VertexGraph brute_force_adjacency(const StandardFormLP& lp, std::uint64_t max_bases) {
  const int n = lp.cols();
  const int m = lp.rows();
  // C(n, m) without overflow past the guard.
  double combinations = 1.0;
  for (int k = 1; k <= m; ++k) combinations = combinations * (n - m + k) / k;
  if (combinations > static_cast<double>(max_bases)) {
    fail(ErrorCode::kCombinatorialGuard,
         "C(" + std::to_string(n) + "," + std::to_string(m) + ") exceeds " +
             std::to_string(max_bases) + " bases");
  }

  VertexGraph graph;
  std::unordered_map<BasisKey, int, BasisKeyHash> vertex_of;
  std::vector<int> combo(m);
  for (int i = 0; i < m; ++i) combo[i] = i;
  for (;;) {
    const Basis basis = Basis::from_basic(combo, n);
    Eigen::PartialPivLU<Matrix> lu(basis_matrix(lp, basis));
    if (m == 0 || !lu_is_singular(lu, kSingularRcond)) {
      const Vector x = m == 0 ? Vector() : Vector(lu.solve(lp.b));
      if (m == 0 || x.minCoeff() >= -kTol.feas) {
        Vector z = Vector::Zero(n);
        for (int i = 0; i < m; ++i) z(combo[i]) = x(i);
        z = snap(std::move(z));
        int id = graph.find(z);
        if (id < 0) {
          id = static_cast<int>(graph.vertices.size());
          graph.vertices.push_back(z);
          graph.neighbors.emplace_back();
          graph.bases.emplace_back();
        }
        graph.bases[id].push_back(basis);
        vertex_of.emplace(BasisKey(basis), id);
      }
    }
    // Next combination in lexicographic order.
    int i = m - 1;
    while (i >= 0 && combo[i] == n - m + i) --i;
    if (i < 0) break;
    ++combo[i];
    for (int k = i + 1; k < m; ++k) combo[k] = combo[k - 1] + 1;
  }

  std::vector<std::unordered_set<int>> adjacency(graph.vertices.size());
  for (const auto& [key, id] : vertex_of) {
    const Basis basis = Basis::from_basic(key.sorted_basic, n);
    for (int r = 0; r < m; ++r) {
      for (int j : basis.nonbasic) {
        Basis other = basis;
        other.basic[r] = j;
        const auto it = vertex_of.find(BasisKey(other));
        if (it != vertex_of.end() && it->second != id) adjacency[id].insert(it->second);
      }
    }
  }
  for (std::size_t v = 0; v < adjacency.size(); ++v) {
    graph.neighbors[v].assign(adjacency[v].begin(), adjacency[v].end());
    std::sort(graph.neighbors[v].begin(), graph.neighbors[v].end());
  }
  return graph;
}

}  // namespace vertexdfl
