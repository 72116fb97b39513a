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

// Small LPs and independent reference computations shared by the tests.

#ifndef VERTEXDFL_TESTS_FIXTURES_HPP_
#define VERTEXDFL_TESTS_FIXTURES_HPP_

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <vector>

#include "vertexdfl/adjacency.hpp"
#include "vertexdfl/benchgen.hpp"
#include "vertexdfl/lp.hpp"
#include "vertexdfl/simplex.hpp"

namespace vertexdfl::testing {

inline Matrix mat(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix m(static_cast<int>(rows.size()), static_cast<int>(rows.begin()->size()));
  int i = 0;
  for (const auto& row : rows) {
    int j = 0;
    for (double v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

inline Vector vec(std::initializer_list<double> values) {
  Vector v(static_cast<int>(values.size()));
  int i = 0;
  for (double x : values) v(i++) = x;
  return v;
}

// z <= 1 in two dimensions.
inline StandardFormLP unit_box(Sense sense = Sense::kMin) {
  return to_standard_form(mat({{1, 0}, {0, 1}}), vec({1, 1}), sense);
}

inline StandardFormLP unit_cube() {
  return to_standard_form(Matrix::Identity(3, 3), Vector::Ones(3), Sense::kMin);
}

// {z >= 0, z1 + z2 + z3 = 1}
inline StandardFormLP triangle() {
  return make_equality_lp(mat({{1, 1, 1}}), vec({1}), 3, Sense::kMin);
}

// {z1 + z3 <= 1, z2 + z3 <= 1, z >= 0}; the apex (0,0,1) is degenerate.
inline StandardFormLP pyramid() {
  return to_standard_form(mat({{1, 0, 1}, {0, 1, 1}}), vec({1, 1}), Sense::kMin);
}

// Random A ~ U[0,1] LP with n_structural in [6,12] and m in [2,6].
inline StandardFormLP random_small_lp(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const int n = std::uniform_int_distribution<int>(6, 12)(rng);
  const int m = std::uniform_int_distribution<int>(2, std::min(6, n - 1))(rng);
  return gen_random_lp(n, m, seed);
}

// Small integer data with integer right-hand sides: vertices are often
// degenerate, which the U[0,1] generator never produces.
inline StandardFormLP degenerate_small_lp(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const int n = std::uniform_int_distribution<int>(3, 5)(rng);
  const int m = std::uniform_int_distribution<int>(2, 4)(rng);
  std::uniform_int_distribution<int> entry(0, 2);
  Matrix A(m, n);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) A(i, j) = entry(rng);
    A(i, std::uniform_int_distribution<int>(0, n - 1)(rng)) += 1.0;
  }
  // Boundedness: every variable appears with a positive coefficient.
  for (int j = 0; j < n; ++j) {
    if (A.col(j).maxCoeff() == 0.0) A(0, j) = 1.0;
  }
  Vector b = Vector::Constant(m, std::uniform_int_distribution<int>(1, 3)(rng));
  return to_standard_form(A, b, Sense::kMin);
}

inline Vector random_cost(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Vector c(n);
  for (int j = 0; j < n; ++j) c(j) = normal(rng);
  return c;
}

// All vertices of {Az = b, z >= 0} by enumerating column subsets and
// solving each square system with a full-pivot LU.
inline std::vector<Vector> enumerate_vertices(const StandardFormLP& lp) {
  const int m = lp.rows();
  const int n = lp.cols();
  std::vector<Vector> out;
  std::vector<int> pick(m);
  for (int i = 0; i < m; ++i) pick[i] = i;
  while (true) {
    Matrix B(m, m);
    for (int i = 0; i < m; ++i) B.col(i) = lp.A.col(pick[i]);
    Eigen::FullPivLU<Matrix> lu(B);
    if (lu.rank() == m) {
      const Vector xb = lu.solve(lp.b);
      if (xb.minCoeff() >= -1e-9) {
        Vector z = Vector::Zero(n);
        for (int i = 0; i < m; ++i) z(pick[i]) = std::max(0.0, xb(i));
        const bool seen = std::any_of(out.begin(), out.end(), [&](const Vector& v) {
          return (v - z).lpNorm<Eigen::Infinity>() <= 1e-7;
        });
        if (!seen) out.push_back(z);
      }
    }
    int k = m - 1;
    while (k >= 0 && pick[k] == n - m + k) --k;
    if (k < 0) break;
    ++pick[k];
    for (int i = k + 1; i < m; ++i) pick[i] = pick[i - 1] + 1;
  }
  return out;
}

// Two vertices are adjacent when the face on which both sit (all columns
// zero at both) is one-dimensional: rank [A; I_zero] = n - 1.
inline bool geometric_edge(const StandardFormLP& lp, const Vector& u, const Vector& v) {
  std::vector<int> zeros;
  for (int j = 0; j < lp.cols(); ++j) {
    if (std::abs(u(j)) <= 1e-9 && std::abs(v(j)) <= 1e-9) zeros.push_back(j);
  }
  Matrix M = Matrix::Zero(lp.rows() + static_cast<int>(zeros.size()), lp.cols());
  M.topRows(lp.rows()) = lp.A;
  for (std::size_t k = 0; k < zeros.size(); ++k) M(lp.rows() + static_cast<int>(k), zeros[k]) = 1.0;
  Eigen::FullPivLU<Matrix> lu(M);
  lu.setThreshold(1e-10);
  return lu.rank() == lp.cols() - 1;
}

// Minimum of the internal (min-sense) objective over all vertices.
inline double brute_min_internal(const StandardFormLP& lp, const Vector& user_cost) {
  const Vector c = internal_cost(lp, user_cost);
  double best = std::numeric_limits<double>::infinity();
  for (const Vector& z : enumerate_vertices(lp)) best = std::min(best, c.dot(z));
  return best;
}

// Rows of M equal the vectors in 'expected' as sets, within tol.
inline bool same_vertex_set(const Matrix& rows, const std::vector<Vector>& expected,
                            double tol = 1e-7) {
  if (rows.rows() != static_cast<int>(expected.size())) return false;
  for (const Vector& e : expected) {
    bool found = false;
    for (int r = 0; r < rows.rows() && !found; ++r) {
      found = (rows.row(r).transpose() - e).lpNorm<Eigen::Infinity>() <= tol;
    }
    if (!found) return false;
  }
  return true;
}

// Central differences of a scalar function, one coordinate at a time.
template <typename F>
Vector central_difference(F&& f, const Vector& x, double h) {
  Vector g(x.size());
  Vector xp = x;
  for (int j = 0; j < x.size(); ++j) {
    xp(j) = x(j) + h;
    const double up = f(xp);
    xp(j) = x(j) - h;
    const double down = f(xp);
    xp(j) = x(j);
    g(j) = (up - down) / (2.0 * h);
  }
  return g;
}

// Largest entrywise error relative to the analytic gradient's scale.
inline double relative_error(const Vector& analytic, const Vector& numeric) {
  const double scale = std::max(1.0, analytic.lpNorm<Eigen::Infinity>());
  return (analytic - numeric).lpNorm<Eigen::Infinity>() / scale;
}

}  // namespace vertexdfl::testing

#endif  // VERTEXDFL_TESTS_FIXTURES_HPP_
