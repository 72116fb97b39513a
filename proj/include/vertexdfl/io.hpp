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

#ifndef VERTEXDFL_IO_HPP_
#define VERTEXDFL_IO_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "json.hpp"

#include "vertexdfl/benchgen.hpp"
#include "vertexdfl/model.hpp"
#include "vertexdfl/store.hpp"

namespace vertexdfl {

using Json = nlohmann::json;

// Writes to a temporary sibling and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);
std::string read_file(const std::filesystem::path& path);
Json read_json(const std::filesystem::path& path);

// 64-bit FNV-1a, printed as 16 hex digits.
std::string fnv1a_hex(std::string_view bytes);

Json vector_to_json(const Vector& v);
Vector vector_from_json(const Json& j);
Json matrix_to_json(const Matrix& m);  // array of rows
Matrix matrix_from_json(const Json& j);

// {A, b, sense, n_structural, names}
Json lp_to_json(const StandardFormLP& lp);
StandardFormLP lp_from_json(const Json& j);

// One record per line: {id, x, c?, z_star, basis}, plus z_int / int_value
// on instances that carry an integer optimum.
std::string dataset_to_jsonl(const Dataset& data);
// Split and shape fields are not part of the records; callers restore them.
std::vector<DataInstance> instances_from_jsonl(const std::string& text, const StandardFormLP& lp);

// {"<id>": {vertex, adjacent, sigma, bases_visited}, ...}
Json adjacency_to_json(const AdjacencyStore& store);
AdjacencyStore adjacency_from_json(const Json& j);

// Same layout, streamed: stores of large LPs are gigabytes as a JSON tree.
// The writer holds one record at a time; the reader parses events straight
// into the store. Writing is atomic.
void write_adjacency_file(const std::filesystem::path& path, const AdjacencyStore& store);
AdjacencyStore read_adjacency_file(const std::filesystem::path& path);

// {W, bias, meta}
Json checkpoint_to_json(const LinearModel& model, const Json& meta);
LinearModel checkpoint_from_json(const Json& j, Json* meta = nullptr);

}  // namespace vertexdfl

#endif  // VERTEXDFL_IO_HPP_
