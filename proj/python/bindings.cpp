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

// Thin Python surface: LPs, checkpoints and configs cross the boundary as
// JSON text; vectors and matrices as numpy arrays.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "vertexdfl/adjacency.hpp"
#include "vertexdfl/experiment.hpp"
#include "vertexdfl/io.hpp"
#include "vertexdfl/losses.hpp"
#include "vertexdfl/simplex.hpp"

namespace py = pybind11;
using namespace vertexdfl;

namespace {

StandardFormLP parse_lp(const std::string& text) { return lp_from_json(Json::parse(text)); }

py::dict bfs_dict(const BasicFeasibleSolution& bfs) {
  py::dict d;
  d["z"] = bfs.z;
  d["basis"] = bfs.basis.basic;
  d["sigma"] = bfs.sigma;
  d["objective"] = bfs.objective_value;
  return d;
}

ExperimentConfig parse_config(const std::string& text) {
  return ExperimentConfig::from_json(Json::parse(text));
}

py::dict row_dict(const ResultsRow& r) {
  py::dict d;
  d["benchmark"] = r.benchmark;
  d["method"] = r.method;
  d["seed"] = r.seed;
  d["regret"] = r.regret;
  d["precompute_s"] = r.precompute_s;
  d["train_s"] = r.train_s;
  d["solver_calls"] = r.solver_calls;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "vertexdfl native core";
  py::register_exception<Error>(m, "VertexdflError", PyExc_RuntimeError);

  m.def("gen_random_lp", [](int n, int m_rows, std::uint64_t seed) {
    return lp_to_json(gen_random_lp(n, m_rows, seed)).dump();
  }, py::arg("n_structural"), py::arg("m"), py::arg("seed"));

  m.def("solve_lp", [](const std::string& lp, const Vector& cost) {
    return bfs_dict(solve_lp(parse_lp(lp), cost));
  }, py::arg("lp_json"), py::arg("cost"));

  m.def("adjacent_vertices", [](const std::string& lp_text, const Vector& cost) {
    const StandardFormLP lp = parse_lp(lp_text);
    const BasicFeasibleSolution bfs = solve_lp(lp, cost);
    const AdjacencySet set = enumerate_adjacent_vertices(lp, bfs);
    py::dict d;
    d["vertex"] = set.vertex;
    d["adjacent"] = set.adjacent;
    d["sigma"] = set.sigma;
    d["bases_visited"] = set.bases_visited;
    return d;
  }, py::arg("lp_json"), py::arg("cost"));

  m.def("min_bases_bound", &min_bases_bound, py::arg("dimension"), py::arg("sigma"));

  m.def("lava_loss", [](const Vector& c_hat, const Vector& z_star, const Matrix& z_adj,
                        double epsilon, bool maximize) {
    const LossValueGrad r =
        lava_loss(c_hat, z_star, z_adj, EpsilonMargin(epsilon), maximize ? Sense::kMax : Sense::kMin);
    return py::make_tuple(r.value, r.grad);
  }, py::arg("c_hat"), py::arg("z_star"), py::arg("z_adj"), py::arg("epsilon") = 0.1,
     py::arg("maximize") = false);

  m.def("mse_loss", [](const Vector& c_hat, const Vector& c) {
    const LossValueGrad r = mse_loss(c_hat, c);
    return py::make_tuple(r.value, r.grad);
  }, py::arg("c_hat"), py::arg("c"));

  m.def("normalized_regret", [](const std::vector<double>& regrets, const std::vector<double>& achieved) {
    if (regrets.size() != achieved.size()) throw Error(ErrorCode::kInvalidArgument, "length mismatch");
    std::vector<DecisionOutcome> outcomes;
    for (std::size_t k = 0; k < regrets.size(); ++k) outcomes.push_back({regrets[k], achieved[k]});
    return normalized_regret(outcomes);
  }, py::arg("regrets"), py::arg("achieved"));

  // Pipeline commands; each takes the JSON config text and one seed.
  m.def("generate", [](const std::string& config, std::uint64_t seed) {
    const ExperimentConfig c = parse_config(config);
    py::gil_scoped_release release;
    cmd_generate(c, c.benchmark, seed);
    return run_paths(c, c.benchmark, seed).dir.string();
  }, py::arg("config_json"), py::arg("seed"));

  m.def("precompute", [](const std::string& config, std::uint64_t seed) {
    const ExperimentConfig c = parse_config(config);
    py::gil_scoped_release release;
    return cmd_precompute(c, c.benchmark, seed).precompute_seconds;
  }, py::arg("config_json"), py::arg("seed"));

  m.def("train", [](const std::string& config, std::uint64_t seed) {
    const ExperimentConfig c = parse_config(config);
    TrainReport r;
    {
      py::gil_scoped_release release;
      r = cmd_train(c, c.benchmark, seed, c.method);
    }
    py::dict d;
    d["best_epoch"] = r.best_epoch;
    d["best_val_regret"] = r.best_val_regret;
    d["train_s"] = r.train_seconds;
    d["lp_solve_calls"] = r.lp_solve_calls;
    d["epochs"] = r.epochs;
    d["stop_reason"] = r.stop_reason;
    return d;
  }, py::arg("config_json"), py::arg("seed"));

  m.def("evaluate", [](const std::string& config, std::uint64_t seed) {
    const ExperimentConfig c = parse_config(config);
    ResultsRow r;
    {
      py::gil_scoped_release release;
      r = cmd_evaluate(c, c.benchmark, seed, c.method);
    }
    return row_dict(r);
  }, py::arg("config_json"), py::arg("seed"));

  m.attr("RESULTS_HEADER") = std::string(kResultsHeader);
}
