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

#ifndef VERTEXDFL_STORE_HPP_
#define VERTEXDFL_STORE_HPP_

#include <map>
#include <span>

#include "vertexdfl/adjacency.hpp"
#include "vertexdfl/benchgen.hpp"

namespace vertexdfl {

// Adjacent vertices per dataset instance id.
struct AdjacencyStore {
  std::map<int, AdjacencySet> entries;
  double precompute_seconds = 0.0;  // summed over all runs that filled it

  bool contains(int id) const { return entries.count(id) > 0; }
  const AdjacencySet& at(int id) const;
};

// True when no adjacent vertex improves on z under cost c (user sense):
// c'z <= c'z_adj for min problems, >= for max, within tol.
bool beats_all_neighbors(const StandardFormLP& lp, const Vector& c, const Vector& z,
                         const Matrix& adjacent, double tol = kTol.obj);

// Fills the store for every id that is missing (existing entries are kept,
// so an interrupted run resumes). When an instance carries its true cost the
// stored vertex is checked against its neighbors.
void precompute_adjacency(const StandardFormLP& lp, const Dataset& data, std::span<const int> ids,
                          AdjacencyStore& store, AdjacencyOptions options = {}, int jobs = 1);

}  // namespace vertexdfl

#endif  // VERTEXDFL_STORE_HPP_
