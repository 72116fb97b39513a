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

#ifndef VERTEXDFL_ADJACENCY_HPP_
#define VERTEXDFL_ADJACENCY_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "vertexdfl/common.hpp"
#include "vertexdfl/lp.hpp"
#include "vertexdfl/simplex.hpp"

namespace vertexdfl {

// D = -B^{-1} N. Column q is the change of the basic variables when the
// nonbasic variable basis.nonbasic[q] increases by one.
struct PivotDirectionMatrix {
  Matrix D;
};

PivotDirectionMatrix compute_directions(const StandardFormLP& lp, const Basis& basis);

// max |B D + N| over all entries.
double direction_residual(const StandardFormLP& lp, const Basis& basis,
                          const PivotDirectionMatrix& directions);

struct RatioTest {
  double theta_star = 0.0;
  std::vector<int> argmin;  // basic positions attaining theta_star
};

// Minimum ratio over basic positions with d_i < -tol_zero. Throws
// kUnboundedEdge when no entry decreases.
RatioTest min_ratio_test(const Vector& z, const Basis& basis,
                         const Eigen::Ref<const Vector>& direction);

// Leaving position for a zero-step pivot on nonbasic column j that keeps
// column t a transition column: argmax over argmin of D(k,t) / D(k,j), ties
// to the lowest basic variable index. t and j are nonbasic positions.
int tnp_select_leaving(const PivotDirectionMatrix& directions, int t, int j,
                       std::span<const int> argmin, const Basis& basis);

// Canonical, hashable form of a basis: its basic indices sorted ascending.
struct BasisKey {
  std::vector<int> sorted_basic;

  explicit BasisKey(const Basis& basis);
  bool operator==(const BasisKey&) const = default;
};

struct BasisKeyHash {
  std::size_t operator()(const BasisKey& key) const noexcept;
};

// Lower bound on the number of bases of a sigma-degenerate vertex of a
// polytope of the given dimension: 2^(sigma-1) * (dimension - sigma + 2).
double min_bases_bound(int dimension, int sigma);

struct AdjacencyOptions {
  // 0 selects max(10 * min_bases_bound(n - m, sigma), 64).
  std::uint64_t max_bases = 0;
};

// Returns a basis of the vertex from which some pivot leaves the vertex
// (theta* > 0). Searches the vertex's bases breadth-first through
// lexicographic zero-step pivots when the given basis does not qualify.
Basis find_transition_basis(const StandardFormLP& lp, const BasicFeasibleSolution& bfs,
                            AdjacencyOptions options = {});

struct AdjacencySet {
  Vector vertex;
  Matrix adjacent;  // one adjacent vertex per row
  std::uint64_t bases_visited = 0;
  int sigma = 0;
};

AdjacencySet enumerate_adjacent_vertices(const StandardFormLP& lp,
                                         const BasicFeasibleSolution& bfs,
                                         AdjacencyOptions options = {});

// Exhaustive reference: every feasible basis, grouped into vertices; two
// vertices are adjacent when some pair of their bases differs in one column.
struct VertexGraph {
  std::vector<Vector> vertices;
  std::vector<std::vector<int>> neighbors;  // ascending vertex ids
  std::vector<std::vector<Basis>> bases;

  // Vertex id within tol_vertex_dedup of z, or -1.
  int find(const Vector& z) const;
};

VertexGraph brute_force_adjacency(const StandardFormLP& lp, std::uint64_t max_bases = 200000);

}  // namespace vertexdfl

#endif  // VERTEXDFL_ADJACENCY_HPP_
