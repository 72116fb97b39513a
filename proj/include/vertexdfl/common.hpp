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

#ifndef VERTEXDFL_COMMON_HPP_
#define VERTEXDFL_COMMON_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace vertexdfl {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Numerical tolerances shared by the solver, the adjacency enumeration and
// the losses. All values are absolute unless noted.
struct Tolerances {
  double feas = 1e-8;          // Az = b and z >= 0 residuals.
  double zero = 1e-9;          // a basic value at or below this is degenerate.
  double obj = 1e-7;           // objective comparisons.
  double rank_rel = 1e-10;     // relative to the largest row norm.
  double ratio = 1e-9;         // theta* above this is a nondegenerate step.
  double vertex_dedup = 1e-7;  // infinity-norm distance for equal vertices.
  double reduced_cost = 1e-9;  // simplex optimality.
};

inline constexpr Tolerances kTol{};

enum class Sense { kMin, kMax };

std::string_view to_string(Sense sense);
Sense sense_from_string(std::string_view text);

enum class ErrorCode {
  kInvalidArgument,
  kRankDeficient,
  kInfeasible,
  kUnbounded,
  kMaxPivotsExceeded,
  kSingularBasis,
  kUnboundedEdge,
  kNoTransitionNode,
  kExplorationCapExceeded,
  kNodeLimit,
  kCombinatorialGuard,
  kContractViolation,
  kNonFinite,
  kParse,
  kIo,
  kConfig,
  kMissingAdjacency,
};

std::string_view to_string(ErrorCode code);

// Every failure in the library surfaces as this exception; `code()` lets
// callers (and the CLI exit-code mapping) react without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

}  // namespace vertexdfl

#endif  // VERTEXDFL_COMMON_HPP_
