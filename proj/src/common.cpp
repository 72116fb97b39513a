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

#include "vertexdfl/common.hpp"

namespace vertexdfl {

std::string_view to_string(Sense sense) { return sense == Sense::kMax ? "max" : "min"; }

Sense sense_from_string(std::string_view text) {
  if (text == "min") return Sense::kMin;
  if (text == "max") return Sense::kMax;
  fail(ErrorCode::kParse, "sense must be \"min\" or \"max\", got \"" + std::string(text) + "\"");
}

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kRankDeficient: return "RankDeficient";
    case ErrorCode::kInfeasible: return "Infeasible";
    case ErrorCode::kUnbounded: return "Unbounded";
    case ErrorCode::kMaxPivotsExceeded: return "MaxPivotsExceeded";
    case ErrorCode::kSingularBasis: return "SingularBasis";
    case ErrorCode::kUnboundedEdge: return "UnboundedEdge";
    case ErrorCode::kNoTransitionNode: return "NoTransitionNode";
    case ErrorCode::kExplorationCapExceeded: return "ExplorationCapExceeded";
    case ErrorCode::kNodeLimit: return "NodeLimit";
    case ErrorCode::kCombinatorialGuard: return "CombinatorialGuard";
    case ErrorCode::kContractViolation: return "ContractViolation";
    case ErrorCode::kNonFinite: return "NonFinite";
    case ErrorCode::kParse: return "Parse";
    case ErrorCode::kIo: return "Io";
    case ErrorCode::kConfig: return "Config";
    case ErrorCode::kMissingAdjacency: return "MissingAdjacency";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

}  // namespace vertexdfl
