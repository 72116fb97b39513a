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

// End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
// exits nonzero if any fails. Arguments select a subset: "acceptance 1 3 5".
// VERTEXDFL_ACCEPTANCE_OUT overrides the scratch directory.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <spdlog/spdlog.h>

#include "../unit/fixtures.hpp"
#include "vertexdfl/experiment.hpp"
#include "vertexdfl/losses.hpp"
#include "vertexdfl/store.hpp"

namespace vertexdfl::acceptance {
namespace {

using namespace testing;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

// Pinned tolerances and thresholds.
constexpr double kVertexTol = 1e-7;
constexpr double kObjectiveTol = 1e-7;
constexpr double kAdjacencyBudgetS = 120.0;
constexpr double kLocalGlobalBudgetS = 60.0;
constexpr int kBackwardPairs = 500;
constexpr double kFdStep = 1e-6;
constexpr double kFdRelTol = 1e-5;
constexpr int kFdPoints = 100;
constexpr double kLavaRandomLpMax = 0.05;
constexpr double kLavaKnapsackMax = 0.13;
constexpr double kLavaShortestPathMax = 0.12;
constexpr double kMseOverLavaMin = 3.0;
constexpr double kLavaSpoGapMax = 0.02;
constexpr double kEpsInfOverDefaultMin = 3.0;
constexpr double kEpsZeroSlack = 0.005;
constexpr double kSpoOverLavaTimeMin = 5.0;
constexpr double kPrecomputeShareMin = 0.5;
constexpr double kExplorationFactor = 10.0;
const std::vector<std::uint64_t> kSeeds = {0, 1, 2, 3, 4};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Verdict {
  bool pass = true;
  std::vector<std::string> notes;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    notes.push_back((ok ? "ok: " : "violated: ") + what);
  }
};

std::string fmt_num(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

std::vector<Vector> neighbors_in(const VertexGraph& g, const Vector& z) {
  std::vector<Vector> out;
  const int id = g.find(z);
  if (id < 0) return out;
  for (int k : g.neighbors[id]) out.push_back(g.vertices[k]);
  return out;
}

// 1 ------------------------------------------------------------------------

Verdict adjacency_equivalence() {
  Verdict v;
  const auto t0 = Clock::now();
  std::vector<std::pair<std::string, StandardFormLP>> lps;
  for (std::uint64_t s = 0; s < 100; ++s) lps.emplace_back("random " + std::to_string(s), random_small_lp(5000 + s));
  lps.emplace_back("pyramid", pyramid());
  lps.emplace_back("cube", unit_cube());
  std::mt19937_64 rng(2024);
  int checks = 0;
  int mismatches = 0;
  int degenerate = 0;
  for (const auto& [name, lp] : lps) {
    const VertexGraph g = brute_force_adjacency(lp);
    for (int k = 0; k < 5; ++k) {
      const Vector c = random_cost(lp.n_structural, rng);
      const BasicFeasibleSolution bfs = solve_lp(lp, c);
      const AdjacencySet set = enumerate_adjacent_vertices(lp, bfs);
      ++checks;
      degenerate += set.sigma > 0;
      if (g.find(bfs.z) < 0 || !same_vertex_set(set.adjacent, neighbors_in(g, bfs.z), kVertexTol)) {
        ++mismatches;
        if (mismatches <= 3) v.notes.push_back("mismatch on " + name + " cost " + std::to_string(k));
      }
    }
  }
  // The pyramid apex is the classic degenerate vertex; hit it from every basis.
  {
    const StandardFormLP lp = pyramid();
    const VertexGraph g = brute_force_adjacency(lp);
    for (std::size_t i = 0; i < g.vertices.size(); ++i) {
      for (const Basis& basis : g.bases[i]) {
        const Vector z = basic_solution_from_basis(lp, basis);
        const AdjacencySet set =
            enumerate_adjacent_vertices(lp, {z, basis, degeneracy_degree(z, basis), 0.0});
        ++checks;
        if (!same_vertex_set(set.adjacent, neighbors_in(g, z), kVertexTol)) ++mismatches;
      }
    }
  }
  const double elapsed = seconds_since(t0);
  v.require(mismatches == 0, std::to_string(checks - mismatches) + "/" + std::to_string(checks) +
                                 " neighborhoods equal the exhaustive oracle (" +
                                 std::to_string(degenerate) + " degenerate optima)");
  v.require(elapsed < kAdjacencyBudgetS, "runtime " + fmt_num(elapsed, 1) + " s < 120 s");
  return v;
}

// 2 ------------------------------------------------------------------------

Verdict optimality_equivalence() {
  Verdict v;
  const auto t0 = Clock::now();
  std::mt19937_64 rng(77);
  int forward_fail = 0;
  int backward_fail = 0;
  int local_optima = 0;
  int pairs = 0;
  std::uint64_t lp_seed = 9000;
  while (pairs < kBackwardPairs) {
    const StandardFormLP lp = lp_seed % 2 ? degenerate_small_lp(lp_seed) : random_small_lp(lp_seed);
    ++lp_seed;
    const VertexGraph g = brute_force_adjacency(lp);
    std::uniform_int_distribution<std::size_t> pick(0, g.vertices.size() - 1);
    for (int k = 0; k < 10 && pairs < kBackwardPairs; ++k, ++pairs) {
      const Vector c = random_cost(lp.n_structural, rng);
      const BasicFeasibleSolution opt = solve_lp(lp, c);
      const AdjacencySet at_opt = enumerate_adjacent_vertices(lp, opt);
      forward_fail += !beats_all_neighbors(lp, c, opt.z, at_opt.adjacent, kObjectiveTol);
      // Half the pairs use the optimum so that the "beats all" branch is
      // exercised often; the rest use a uniformly drawn vertex.
      const std::size_t idx = k % 2 ? g.find(opt.z) : pick(rng);
      const Vector& z = g.vertices[idx];
      const Basis& basis = g.bases[idx].front();
      const AdjacencySet set =
          enumerate_adjacent_vertices(lp, {z, basis, degeneracy_degree(z, basis), 0.0});
      const bool local = beats_all_neighbors(lp, c, z, set.adjacent, kObjectiveTol);
      const bool global = std::abs(user_objective(lp, c, z) - opt.objective_value) <= kObjectiveTol;
      local_optima += local;
      backward_fail += local != global;
    }
  }
  // Stored optima of a full-size random LP, against their computed neighbors.
  const Benchmark b = build_benchmark(BenchmarkConfig{}, 0);
  const Dataset data = gen_dataset(b, gen_feature_map(b.lp.n_structural, 5, 8, 0.0, 0),
                                   DatasetSizes{40, 10, 1}, 0);
  std::vector<int> ids = data.split.train;
  AdjacencyStore store;
  precompute_adjacency(b.lp, data, ids, store);
  for (int id : ids) {
    const DataInstance& inst = data.instances[id];
    forward_fail += !beats_all_neighbors(b.lp, *inst.c, inst.z_star, store.at(id).adjacent);
  }
  const double elapsed = seconds_since(t0);
  v.require(forward_fail == 0, "forward: every solver optimum beats all its neighbors (" +
                                   std::to_string(forward_fail) + " failures)");
  v.require(backward_fail == 0, "backward: " + std::to_string(local_optima) +
                                    " local optima among " + std::to_string(kBackwardPairs) +
                                    " pairs, all global; " + std::to_string(backward_fail) +
                                    " disagreements");
  v.require(elapsed < kLocalGlobalBudgetS, "runtime " + fmt_num(elapsed, 1) + " s < 60 s");
  return v;
}

// 3 ------------------------------------------------------------------------

Verdict gradients() {
  Verdict v;
  std::mt19937_64 rng(303);
  double worst_lava = 0.0;
  double worst_mse = 0.0;
  double worst_spo = 0.0;
  for (int k = 0; k < kFdPoints;) {
    const int n = 10;
    const Vector c = random_cost(n, rng);
    const Vector z = random_cost(n, rng);
    Matrix adj(6, n);
    for (int r = 0; r < adj.rows(); ++r) adj.row(r) = random_cost(n, rng).transpose();
    const EpsilonMargin eps(0.1);
    const Vector margins = ((-adj).rowwise() + z.transpose()) * c;
    if (((margins.array() + eps.value()).abs() < 1e-3).any()) continue;  // near a kink
    const Vector fd = central_difference(
        [&](const Vector& x) { return lava_loss(x, z, adj, eps).value; }, c, kFdStep);
    worst_lava = std::max(worst_lava, relative_error(lava_loss(c, z, adj, eps).grad, fd));
    ++k;
  }
  for (int k = 0; k < kFdPoints; ++k) {
    const Vector c = random_cost(10, rng);
    const Vector t = random_cost(10, rng);
    const Vector fd =
        central_difference([&](const Vector& x) { return mse_loss(x, t).value; }, c, kFdStep);
    worst_mse = std::max(worst_mse, relative_error(mse_loss(c, t).grad, fd));
  }
  int trial = 0;
  for (int k = 0; k < kFdPoints;) {
    const StandardFormLP lp = random_small_lp(7000 + trial++);
    SimplexSolver solver(lp);
    const Vector c = random_cost(lp.n_structural, rng);
    const Vector c_hat = random_cost(lp.n_structural, rng);
    const Vector z_star = solver.solve(c).z;
    // Skip points where a step of h changes the inner argmax.
    const Vector inner = solver.solve(2.0 * c_hat - c).z;
    bool kink = false;
    for (int j = 0; j < c_hat.size() && !kink; ++j) {
      for (double sgn : {-1.0, 1.0}) {
        Vector p = c_hat;
        p(j) += sgn * kFdStep;
        kink = kink || (solver.solve(2.0 * p - c).z - inner).lpNorm<Eigen::Infinity>() > 1e-9;
      }
    }
    if (kink) continue;
    const Vector fd = central_difference(
        [&](const Vector& x) { return spo_plus_loss(solver, x, c, z_star).value; }, c_hat,
        kFdStep);
    worst_spo =
        std::max(worst_spo, relative_error(spo_plus_loss(solver, c_hat, c, z_star).grad, fd));
    ++k;
  }
  auto sci = [](double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2e", x);
    return std::string(buf);
  };
  v.require(worst_lava < kFdRelTol, "lava worst relative error " + sci(worst_lava));
  v.require(worst_mse < kFdRelTol, "mse worst relative error " + sci(worst_mse));
  v.require(worst_spo < kFdRelTol, "spo+ worst relative error " + sci(worst_spo));
  return v;
}

// 4-8: the experiment grid -------------------------------------------------

struct Grid {
  ExperimentConfig config;
  BenchmarkConfig random_lp, knapsack, shortest_path;
  std::vector<ResultsRow> rows;
  // Per benchmark tag, one list per seed of (sigma, bases_visited). Whole
  // stores are too large to keep for every seed.
  std::map<std::string, std::vector<std::vector<std::pair<int, std::uint64_t>>>> audits;
  std::vector<std::uint64_t> lava_train_lp_calls;
  std::vector<std::string> failures;
  bool ran = false;

  // Mean over seeds of a column for one (benchmark, method) cell.
  std::optional<double> mean(const BenchmarkConfig& b, const std::string& method,
                             const std::function<double(const ResultsRow&)>& f) const {
    double sum = 0.0;
    int count = 0;
    for (const ResultsRow& r : rows) {
      if (r.benchmark == b.tag() && r.method == method) {
        sum += f(r);
        ++count;
      }
    }
    if (count != static_cast<int>(kSeeds.size())) return std::nullopt;
    return sum / count;
  }
  std::optional<double> regret(const BenchmarkConfig& b, const std::string& method) const {
    return mean(b, method, [](const ResultsRow& r) { return r.regret; });
  }
};

void run_cell(Grid& g, const BenchmarkConfig& bench, std::uint64_t seed,
              const std::vector<std::string>& methods) {
  const auto t0 = Clock::now();
  try {
    cmd_generate(g.config, bench, seed);
    {
      const AdjacencyStore store = cmd_precompute(g.config, bench, seed);
      auto& audit = g.audits[bench.tag()].emplace_back();
      for (const auto& [id, set] : store.entries) audit.emplace_back(set.sigma, set.bases_visited);
    }
    for (const std::string& name : methods) {
      const Method method = Method::parse(name);
      const TrainReport report = cmd_train(g.config, bench, seed, method);
      if (bench.kind == BenchmarkKind::kRandomLp && name == "lava") {
        g.lava_train_lp_calls.push_back(report.lp_solve_calls);
      }
      g.rows.push_back(cmd_evaluate(g.config, bench, seed, method));
    }
  } catch (const std::exception& e) {
    g.failures.push_back(bench.tag() + " seed " + std::to_string(seed) + ": " + e.what());
  }
  std::printf("  [%s seed %llu: %.1f s]\n", bench.tag().c_str(),
              static_cast<unsigned long long>(seed), seconds_since(t0));
  std::fflush(stdout);
}

void run_grid(Grid& g, const fs::path& out) {
  fs::remove_all(out);
  g.config.out = out.string();
  g.config.jobs = 1;
  g.random_lp.kind = BenchmarkKind::kRandomLp;
  g.knapsack.kind = BenchmarkKind::kKnapsack;
  g.shortest_path.kind = BenchmarkKind::kShortestPath;
  for (std::uint64_t seed : kSeeds) {
    run_cell(g, g.random_lp, seed, {"lava", "mse", "spo+", "lava_eps0", "lava_epsinf"});
    run_cell(g, g.shortest_path, seed, {"lava"});
    run_cell(g, g.knapsack, seed, {"lava"});
  }
  g.ran = true;
}

std::string opt_num(const std::optional<double>& x) { return x ? fmt_num(*x) : "missing"; }

Verdict solver_free(const Grid& g) {
  Verdict v;
  v.require(g.lava_train_lp_calls.size() == kSeeds.size(),
            std::to_string(g.lava_train_lp_calls.size()) + " random-LP LAVA runs trained");
  std::uint64_t total = 0;
  for (std::uint64_t calls : g.lava_train_lp_calls) total += calls;
  v.require(total == 0, "LP calls inside timed training: " + std::to_string(total));
  return v;
}

Verdict main_table(const Grid& g) {
  Verdict v;
  const auto lava_lp = g.regret(g.random_lp, "lava");
  const auto mse_lp = g.regret(g.random_lp, "mse");
  const auto spo_lp = g.regret(g.random_lp, "spo+");
  const auto lava_ks = g.regret(g.knapsack, "lava");
  const auto lava_sp = g.regret(g.shortest_path, "lava");
  v.require(lava_lp && *lava_lp <= kLavaRandomLpMax, "random LP lava " + opt_num(lava_lp) + " <= 0.05");
  v.require(lava_ks && *lava_ks <= kLavaKnapsackMax, "knapsack lava " + opt_num(lava_ks) + " <= 0.13");
  v.require(lava_sp && *lava_sp <= kLavaShortestPathMax,
            "shortest path lava " + opt_num(lava_sp) + " <= 0.12");
  v.require(lava_lp && mse_lp && *mse_lp >= kMseOverLavaMin * *lava_lp,
            "random LP mse " + opt_num(mse_lp) + " >= 3 x lava");
  v.require(lava_lp && spo_lp && std::abs(*lava_lp - *spo_lp) <= kLavaSpoGapMax,
            "random LP |lava - spo+| with spo+ " + opt_num(spo_lp) + " <= 0.02");
  return v;
}

Verdict ablation(const Grid& g) {
  Verdict v;
  const auto e0 = g.regret(g.random_lp, "lava_eps0");
  const auto e01 = g.regret(g.random_lp, "lava");
  const auto einf = g.regret(g.random_lp, "lava_epsinf");
  v.require(e01 && einf && *einf >= kEpsInfOverDefaultMin * *e01,
            "eps=inf " + opt_num(einf) + " >= 3 x eps=0.1 " + opt_num(e01));
  v.require(e0 && e01 && *e01 <= *e0 + kEpsZeroSlack,
            "eps=0.1 " + opt_num(e01) + " <= eps=0 " + opt_num(e0) + " + 0.005");
  return v;
}

Verdict efficiency(const Grid& g) {
  Verdict v;
  const auto spo_train = g.mean(g.random_lp, "spo+", [](const ResultsRow& r) { return r.train_s; });
  const auto lava_total = g.mean(g.random_lp, "lava", [](const ResultsRow& r) {
    return r.precompute_s + r.train_s;
  });
  v.require(spo_train && lava_total && *spo_train >= kSpoOverLavaTimeMin * *lava_total,
            "random LP spo+ train " + opt_num(spo_train) + " s >= 5 x lava total " +
                opt_num(lava_total) + " s");
  const auto pre = g.mean(g.shortest_path, "lava", [](const ResultsRow& r) { return r.precompute_s; });
  const auto total = g.mean(g.shortest_path, "lava", [](const ResultsRow& r) {
    return r.precompute_s + r.train_s;
  });
  v.require(pre && total && *pre > kPrecomputeShareMin * *total,
            "shortest path precompute " + opt_num(pre) + " s of lava total " + opt_num(total) +
                " s exceeds half");
  return v;
}

Verdict degeneracy(const Grid& g) {
  Verdict v;
  const auto find = [&](const BenchmarkConfig& b) {
    const auto it = g.audits.find(b.tag());
    return it == g.audits.end() ? std::vector<std::vector<std::pair<int, std::uint64_t>>>{}
                                : it->second;
  };
  const auto lp_audits = find(g.random_lp);
  const auto sp_audits = find(g.shortest_path);
  std::size_t lp_vertices = 0;
  std::size_t lp_degenerate = 0;
  for (const auto& audit : lp_audits) {
    for (const auto& [sigma, visited] : audit) {
      ++lp_vertices;
      lp_degenerate += sigma != 0;
    }
  }
  v.require(lp_audits.size() == kSeeds.size() && lp_vertices > 0 && lp_degenerate == 0,
            "random LP: " + std::to_string(lp_degenerate) + " of " + std::to_string(lp_vertices) +
                " vertices degenerate");
  std::size_t sp_vertices = 0;
  std::size_t sp_bad_sigma = 0;
  std::size_t sp_single = 0;
  std::size_t sp_over = 0;
  std::uint64_t max_visited = 0;
  int max_sigma = 0;
  const StandardFormLP grid_lp = build_benchmark(g.shortest_path, 0).lp;
  const int d = grid_lp.cols() - grid_lp.rows();
  for (const auto& audit : sp_audits) {
    for (const auto& [sigma, visited] : audit) {
      ++sp_vertices;
      sp_bad_sigma += sigma <= 0;
      sp_single += visited <= 1;
      sp_over += static_cast<double>(visited) >= kExplorationFactor * min_bases_bound(d, sigma);
      max_visited = std::max(max_visited, visited);
      max_sigma = std::max(max_sigma, sigma);
    }
  }
  v.require(sp_audits.size() == kSeeds.size() && sp_vertices > 0 && sp_bad_sigma == 0,
            "shortest path: " + std::to_string(sp_vertices - sp_bad_sigma) + " of " +
                std::to_string(sp_vertices) + " vertices have sigma > 0 (max " +
                std::to_string(max_sigma) + ")");
  v.require(sp_vertices > 0 && sp_single == 0,
            "shortest path: " + std::to_string(sp_single) + " vertices visited a single basis");
  v.require(sp_vertices > 0 && sp_over == 0,
            "shortest path: " + std::to_string(sp_over) +
                " explorations reached 10 x U_min (max bases visited " +
                std::to_string(max_visited) + ")");
  return v;
}

void print_grid(const Grid& g) {
  for (const auto& [bench, method] : std::vector<std::pair<BenchmarkConfig, std::string>>{
           {g.random_lp, "lava"}, {g.random_lp, "mse"}, {g.random_lp, "spo+"},
           {g.random_lp, "lava_eps0"}, {g.random_lp, "lava_epsinf"},
           {g.knapsack, "lava"}, {g.shortest_path, "lava"}}) {
    std::printf("  %-14s %-12s regret %s  precompute %s s  train %s s\n", bench.tag().c_str(),
                method.c_str(), opt_num(g.regret(bench, method)).c_str(),
                opt_num(g.mean(bench, method, [](const ResultsRow& r) { return r.precompute_s; })).c_str(),
                opt_num(g.mean(bench, method, [](const ResultsRow& r) { return r.train_s; })).c_str());
  }
  for (const std::string& f : g.failures) std::printf("  failed: %s\n", f.c_str());
}

}  // namespace
}  // namespace vertexdfl::acceptance

int main(int argc, char** argv) {
  using namespace vertexdfl::acceptance;
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
  if (selected.empty()) selected = {1, 2, 3, 4, 5, 6, 7, 8};
  spdlog::set_level(spdlog::level::warn);

  const char* env = std::getenv("VERTEXDFL_ACCEPTANCE_OUT");
  const fs::path out = env ? fs::path(env) : fs::temp_directory_path() / "vertexdfl_acceptance";

  const std::map<int, std::string> titles{
      {1, "adjacency equals exhaustive oracle"},
      {2, "local optimality iff global optimality"},
      {3, "loss gradients match finite differences"},
      {4, "LAVA training is solver-free"},
      {5, "main regret table"},
      {6, "margin ablation ordering"},
      {7, "efficiency ratios"},
      {8, "degeneracy audit"}};

  Grid grid;
  std::map<int, Verdict> verdicts;
  for (int k : selected) {
    if (!titles.count(k)) {
      std::fprintf(stderr, "unknown criterion %d\n", k);
      return 2;
    }
    if (k >= 4 && !grid.ran) {
      run_grid(grid, out);
      print_grid(grid);
    }
    Verdict v;
    try {
      switch (k) {
        case 1: v = adjacency_equivalence(); break;
        case 2: v = optimality_equivalence(); break;
        case 3: v = gradients(); break;
        case 4: v = solver_free(grid); break;
        case 5: v = main_table(grid); break;
        case 6: v = ablation(grid); break;
        case 7: v = efficiency(grid); break;
        case 8: v = degeneracy(grid); break;
      }
    } catch (const std::exception& e) {
      v.require(false, std::string("exception: ") + e.what());
    }
    for (const std::string& note : v.notes) std::printf("    %s\n", note.c_str());
    std::printf("criterion %d %s: %s\n", k, v.pass ? "PASS" : "FAIL", titles.at(k).c_str());
    std::fflush(stdout);
    verdicts[k] = v;
  }
  bool all = true;
  for (const auto& [k, v] : verdicts) all = all && v.pass;
  return all ? 0 : 1;
}
