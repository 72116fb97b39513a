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

#include "vertexdfl/store.hpp"

#include <chrono>
#include <string>
#include <vector>

#include "vertexdfl/parallel.hpp"

namespace vertexdfl {

const AdjacencySet& AdjacencyStore::at(int id) const {
  const auto it = entries.find(id);
  if (it == entries.end()) {
    fail(ErrorCode::kMissingAdjacency,
         "no adjacent vertices stored for instance " + std::to_string(id) + "; run precompute");
  }
  return it->second;
}

bool beats_all_neighbors(const StandardFormLP& lp, const Vector& c, const Vector& z,
                         const Matrix& adjacent, double tol) {
  const Vector cost = internal_cost(lp, c);
  const double own = cost.dot(z);
  const double scale = std::max(1.0, std::abs(own));
  for (Eigen::Index k = 0; k < adjacent.rows(); ++k) {
    if (adjacent.row(k).dot(cost) < own - tol * scale) return false;
  }
  return true;
}

void precompute_adjacency(const StandardFormLP& lp, const Dataset& data, std::span<const int> ids,
                          AdjacencyStore& store, AdjacencyOptions options, int jobs) {
  std::vector<int> todo;
  for (int id : ids) {
    if (id < 0 || id >= static_cast<int>(data.instances.size())) {
      fail(ErrorCode::kInvalidArgument, "instance id " + std::to_string(id) + " out of range");
    }
    if (!store.contains(id)) todo.push_back(id);
  }
  std::vector<AdjacencySet> results(todo.size());
  const auto start = std::chrono::steady_clock::now();
  parallel_for(static_cast<int>(todo.size()), jobs, [&](int, int k) {
    const DataInstance& inst = data.instances[todo[k]];
    BasicFeasibleSolution bfs;
    bfs.z = inst.z_star;
    bfs.basis = inst.basis;
    bfs.sigma = degeneracy_degree(inst.z_star, inst.basis);
    try {
      results[k] = enumerate_adjacent_vertices(lp, bfs, options);
    } catch (const Error& e) {
      throw Error(e.code(), "instance " + std::to_string(inst.id) + ": " + e.what());
    }
    if (inst.c && !beats_all_neighbors(lp, *inst.c, inst.z_star, results[k].adjacent)) {
      fail(ErrorCode::kContractViolation,
           "instance " + std::to_string(inst.id) + ": stored optimum is beaten by a neighbor");
    }
  });
  store.precompute_seconds +=
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  for (std::size_t k = 0; k < todo.size(); ++k) store.entries[todo[k]] = std::move(results[k]);
}

}  // namespace vertexdfl
