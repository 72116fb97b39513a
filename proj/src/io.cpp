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

#include "vertexdfl/io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>
#include <system_error>

namespace vertexdfl {
namespace {

Json parse(std::string_view text, const std::string& where) {
  try {
    return Json::parse(text);
  } catch (const Json::exception& e) {
    fail(ErrorCode::kParse, where + ": " + e.what());
  }
}

template <typename T>
T field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    fail(ErrorCode::kParse, std::string("missing field \"") + key + "\"");
  }
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception& e) {
    fail(ErrorCode::kParse, std::string("field \"") + key + "\": " + e.what());
  }
}

std::vector<int> basis_to_list(const Basis& basis) { return basis.basic; }

}  // namespace

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::kIo, "cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) fail(ErrorCode::kIo, "short write to " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) fail(ErrorCode::kIo, "cannot rename " + tmp.string() + ": " + ec.message());
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot read " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

Json read_json(const std::filesystem::path& path) { return parse(read_file(path), path.string()); }

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << h;
  return out.str();
}

Json vector_to_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Vector vector_from_json(const Json& j) {
  if (!j.is_array()) fail(ErrorCode::kParse, "expected an array of numbers");
  Vector v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) fail(ErrorCode::kParse, "expected a number at index " + std::to_string(i));
    v(i) = j[i].get<double>();
  }
  return v;
}

Json matrix_to_json(const Matrix& m) {
  Json out = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) out.push_back(vector_to_json(m.row(r).transpose()));
  return out;
}

Matrix matrix_from_json(const Json& j) {
  if (!j.is_array()) fail(ErrorCode::kParse, "expected an array of rows");
  if (j.empty()) return Matrix(0, 0);
  const std::size_t cols = j[0].size();
  Matrix m(j.size(), cols);
  for (std::size_t r = 0; r < j.size(); ++r) {
    if (j[r].size() != cols) fail(ErrorCode::kParse, "ragged matrix at row " + std::to_string(r));
    m.row(r) = vector_from_json(j[r]).transpose();
  }
  return m;
}

Json lp_to_json(const StandardFormLP& lp) {
  return Json{{"A", matrix_to_json(lp.A)},
              {"b", vector_to_json(lp.b)},
              {"sense", std::string(to_string(lp.original_sense))},
              {"n_structural", lp.n_structural},
              {"names", lp.names}};
}

StandardFormLP lp_from_json(const Json& j) {
  StandardFormLP lp;
  lp.A = matrix_from_json(field<Json>(j, "A"));
  lp.b = vector_from_json(field<Json>(j, "b"));
  lp.original_sense = sense_from_string(field<std::string>(j, "sense"));
  lp.n_structural = field<int>(j, "n_structural");
  if (j.contains("names")) lp.names = field<std::vector<std::string>>(j, "names");
  validate(lp);
  return lp;
}

std::string dataset_to_jsonl(const Dataset& data) {
  std::string out;
  for (const DataInstance& inst : data.instances) {
    Json rec{{"id", inst.id},
             {"x", vector_to_json(inst.x)},
             {"z_star", vector_to_json(inst.z_star)},
             {"basis", basis_to_list(inst.basis)}};
    if (inst.c) rec["c"] = vector_to_json(*inst.c);
    if (inst.z_integer) {
      rec["z_int"] = vector_to_json(*inst.z_integer);
      rec["int_value"] = inst.integer_optimal_value;
    }
    out += rec.dump();
    out += '\n';
  }
  return out;
}

std::vector<DataInstance> instances_from_jsonl(const std::string& text, const StandardFormLP& lp) {
  std::vector<DataInstance> instances;
  std::istringstream in(text);
  std::string line;
  for (int line_no = 1; std::getline(in, line); ++line_no) {
    if (line.empty()) continue;
    const Json rec = parse(line, "dataset line " + std::to_string(line_no));
    try {
      DataInstance inst;
      inst.id = field<int>(rec, "id");
      inst.x = vector_from_json(field<Json>(rec, "x"));
      inst.z_star = vector_from_json(field<Json>(rec, "z_star"));
      inst.basis = Basis::from_basic(field<std::vector<int>>(rec, "basis"), lp.cols());
      check_partition(inst.basis, lp.cols(), lp.rows());
      if (inst.z_star.size() != lp.cols()) fail(ErrorCode::kParse, "z_star has the wrong length");
      if (rec.contains("c")) {
        inst.c = vector_from_json(rec.at("c"));
        inst.optimal_value = user_objective(lp, *inst.c, inst.z_star);
      }
      if (rec.contains("z_int")) {
        inst.z_integer = vector_from_json(rec.at("z_int"));
        inst.integer_optimal_value = field<double>(rec, "int_value");
      }
      if (inst.id != static_cast<int>(instances.size())) {
        fail(ErrorCode::kParse, "ids must be consecutive from 0");
      }
      instances.push_back(std::move(inst));
    } catch (const Error& e) {
      throw Error(e.code(), "dataset line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return instances;
}

Json adjacency_to_json(const AdjacencyStore& store) {
  Json out = Json::object();
  for (const auto& [id, set] : store.entries) {
    out[std::to_string(id)] = Json{{"vertex", vector_to_json(set.vertex)},
                                   {"adjacent", matrix_to_json(set.adjacent)},
                                   {"sigma", set.sigma},
                                   {"bases_visited", set.bases_visited}};
  }
  return out;
}

AdjacencyStore adjacency_from_json(const Json& j) {
  if (!j.is_object()) fail(ErrorCode::kParse, "adjacency file must be an object keyed by id");
  AdjacencyStore store;
  for (const auto& [key, rec] : j.items()) {
    int id = 0;
    try {
      id = std::stoi(key);
    } catch (const std::exception&) {
      fail(ErrorCode::kParse, "adjacency key \"" + key + "\" is not an instance id");
    }
    AdjacencySet set;
    set.vertex = vector_from_json(field<Json>(rec, "vertex"));
    set.adjacent = matrix_from_json(field<Json>(rec, "adjacent"));
    if (set.adjacent.rows() == 0) set.adjacent.resize(0, set.vertex.size());
    set.sigma = field<int>(rec, "sigma");
    set.bases_visited = field<std::uint64_t>(rec, "bases_visited");
    store.entries.emplace(id, std::move(set));
  }
  return store;
}

void write_adjacency_file(const std::filesystem::path& path, const AdjacencyStore& store) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::kIo, "cannot write " + tmp.string());
    out << '{';
    bool first = true;
    for (const auto& [id, set] : store.entries) {
      if (!first) out << ",\n";
      first = false;
      const Json rec{{"vertex", vector_to_json(set.vertex)},
                     {"adjacent", matrix_to_json(set.adjacent)},
                     {"sigma", set.sigma},
                     {"bases_visited", set.bases_visited}};
      out << '"' << id << "\":" << rec.dump();
    }
    out << "}\n";
    if (!out) fail(ErrorCode::kIo, "short write to " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) fail(ErrorCode::kIo, "cannot rename " + tmp.string() + ": " + ec.message());
}

namespace {

// Event handler for read_adjacency_file. Depth 1 is the id map, depth 2 a
// record, depth 3 the vertex or the adjacent list, depth 4 an adjacent row.
class AdjacencySax : public nlohmann::json_sax<Json> {
 public:
  explicit AdjacencySax(AdjacencyStore& store) : store_(store) {}

  bool null() override { return bad("null value"); }
  bool boolean(bool) override { return bad("boolean value"); }
  bool number_integer(number_integer_t v) override { return number(static_cast<double>(v), v >= 0); }
  bool number_unsigned(number_unsigned_t v) override { return number(static_cast<double>(v), true); }
  bool number_float(number_float_t v, const string_t&) override { return number(v, false); }
  bool string(string_t&) override { return bad("string value"); }
  bool binary(binary_t&) override { return bad("binary value"); }

  bool start_object(std::size_t) override {
    ++depth_;
    if (depth_ == 2) {
      current_ = AdjacencySet{};
      seen_ = 0;
      return true;
    }
    return depth_ == 1 || bad("unexpected object");
  }
  bool end_object() override {
    if (depth_ == 2) {
      if (seen_ != 0b1111) bad("record " + std::to_string(id_) + " lacks a field");
      if (current_.adjacent.rows() == 0) current_.adjacent.resize(0, current_.vertex.size());
      store_.entries.insert_or_assign(id_, std::move(current_));
    }
    --depth_;
    return true;
  }
  bool key(string_t& k) override {
    if (depth_ == 1) {
      try {
        std::size_t used = 0;
        id_ = std::stoi(k, &used);
        if (used != k.size()) throw std::invalid_argument(k);
      } catch (const std::exception&) {
        bad("adjacency key \"" + k + "\" is not an instance id");
      }
      return true;
    }
    if (k == "vertex") field_ = 0;
    else if (k == "adjacent") field_ = 1;
    else if (k == "sigma") field_ = 2;
    else if (k == "bases_visited") field_ = 3;
    else bad("unknown field \"" + k + "\"");
    seen_ |= 1 << field_;
    return true;
  }
  bool start_array(std::size_t) override {
    ++depth_;
    if (depth_ == 3 && (field_ == 0 || field_ == 1)) {
      values_.clear();
      cols_ = -1;
      rows_ = 0;
      return true;
    }
    if (depth_ == 4 && field_ == 1) {
      row_start_ = values_.size();
      return true;
    }
    return bad("unexpected array");
  }
  bool end_array() override {
    if (depth_ == 4) {
      const int width = static_cast<int>(values_.size() - row_start_);
      if (cols_ >= 0 && width != cols_) bad("ragged adjacent rows in record " + std::to_string(id_));
      cols_ = width;
      ++rows_;
    } else if (field_ == 0) {
      current_.vertex = Eigen::Map<const Vector>(values_.data(), static_cast<Eigen::Index>(values_.size()));
    } else {
      current_.adjacent.resize(rows_, std::max(cols_, 0));
      for (int r = 0; r < rows_; ++r) {
        for (int c = 0; c < cols_; ++c) current_.adjacent(r, c) = values_[r * cols_ + c];
      }
    }
    --depth_;
    return true;
  }
  bool parse_error(std::size_t position, const std::string&,
                   const nlohmann::detail::exception& e) override {
    fail(ErrorCode::kParse, "adjacency file at byte " + std::to_string(position) + ": " + e.what());
  }

 private:
  bool number(double v, bool nonnegative_integer) {
    if ((depth_ == 3 && field_ == 0) || (depth_ == 4 && field_ == 1)) {
      values_.push_back(v);
      return true;
    }
    if (depth_ == 2 && field_ >= 2 && nonnegative_integer) {
      if (field_ == 2) current_.sigma = static_cast<int>(v);
      else current_.bases_visited = static_cast<std::uint64_t>(v);
      return true;
    }
    return bad("unexpected number");
  }
  [[noreturn]] bool bad(const std::string& what) {
    fail(ErrorCode::kParse, "adjacency file: " + what);
  }

  AdjacencyStore& store_;
  AdjacencySet current_;
  std::vector<double> values_;
  std::size_t row_start_ = 0;
  int depth_ = 0;
  int id_ = 0;
  int field_ = -1;
  int seen_ = 0;
  int cols_ = -1;
  int rows_ = 0;
};

}  // namespace

AdjacencyStore read_adjacency_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot read " + path.string());
  AdjacencyStore store;
  AdjacencySax handler(store);
  if (!Json::sax_parse(in, &handler)) fail(ErrorCode::kParse, "cannot parse " + path.string());
  return store;
}

Json checkpoint_to_json(const LinearModel& model, const Json& meta) {
  Json m = meta.is_object() ? meta : Json::object();
  m["items"] = model.items;
  return Json{{"W", matrix_to_json(model.W)}, {"bias", vector_to_json(model.bias)}, {"meta", m}};
}

LinearModel checkpoint_from_json(const Json& j, Json* meta) {
  LinearModel model;
  model.W = matrix_from_json(field<Json>(j, "W"));
  model.bias = vector_from_json(field<Json>(j, "bias"));
  const Json m = j.contains("meta") ? j.at("meta") : Json::object();
  model.items = m.value("items", 0);
  if (model.bias.size() != model.W.rows()) fail(ErrorCode::kParse, "bias length does not match W");
  if (!model.all_finite()) fail(ErrorCode::kParse, "checkpoint has non-finite parameters");
  if (meta != nullptr) *meta = m;
  return model;
}

}  // namespace vertexdfl
