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

#ifndef VERTEXDFL_PARALLEL_HPP_
#define VERTEXDFL_PARALLEL_HPP_

#include <functional>

namespace vertexdfl {

// Runs body(worker, index) for index in [0, count) on up to jobs threads.
// Indices are handed out dynamically; the first exception is rethrown after
// all workers stop.
void parallel_for(int count, int jobs, const std::function<void(int worker, int index)>& body);

// Worker count for a --jobs value (<= 0 means hardware concurrency).
int resolve_jobs(int jobs);

}  // namespace vertexdfl

#endif  // VERTEXDFL_PARALLEL_HPP_
