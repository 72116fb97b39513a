# Copyright 2026 The vertexdfl Authors
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import csv
import json

import numpy as np
import pytest

import vertexdfl as vd


@pytest.fixture(scope="module")
def small_lp():
    return vd.gen_random_lp(12, 5, 3)


def test_lp_layout(small_lp):
    assert set(small_lp) >= {"A", "b", "sense", "n_structural", "names"}
    A = np.asarray(small_lp["A"])
    assert A.shape == (5, 17)
    assert small_lp["n_structural"] == 12


def test_solve_matches_scipy(small_lp):
    linprog = pytest.importorskip("scipy.optimize").linprog
    rng = np.random.default_rng(0)
    A = np.asarray(small_lp["A"])
    b = np.asarray(small_lp["b"])
    n = small_lp["n_structural"]
    sign = -1.0 if small_lp["sense"] == "max" else 1.0
    for _ in range(5):
        c = rng.uniform(0.1, 1.0, n)
        ours = vd.solve_lp(small_lp, c)
        full = np.concatenate([sign * c, np.zeros(A.shape[1] - n)])
        ref = linprog(full, A_eq=A, b_eq=b, bounds=(0, None), method="highs")
        assert ref.status == 0
        assert ours["objective"] == pytest.approx(sign * ref.fun, abs=1e-7)


def test_adjacent_vertices_are_feasible_neighbors(small_lp):
    A = np.asarray(small_lp["A"])
    b = np.asarray(small_lp["b"])
    out = vd.adjacent_vertices(small_lp, np.linspace(0.2, 1.0, 12))
    assert out["sigma"] == 0
    assert out["bases_visited"] == 1
    adj = out["adjacent"]
    assert 0 < adj.shape[0] <= A.shape[1] - A.shape[0]
    for z in adj:
        np.testing.assert_allclose(A @ z, b, atol=1e-7)
        assert z.min() >= -1e-9
        assert np.abs(z - out["vertex"]).max() > 1e-9


def test_min_bases_bound():
    assert vd.min_bases_bound(5, 0) == 1
    assert vd.min_bases_bound(4, 2) == 2 * 4


def test_lava_loss_values():
    value, grad = vd.lava_loss([1.0, 1.0], [0.0, 0.0], [[1.0, 0.0], [0.0, 1.0]])
    assert value == pytest.approx(-0.2)
    np.testing.assert_array_equal(grad, [0.0, 0.0])
    value, grad = vd.lava_loss([1.0, -1.0], [0.0, 0.0], [[1.0, 0.0], [0.0, 1.0]])
    assert value == pytest.approx(-0.1 + 1.0)
    np.testing.assert_array_equal(grad, [0.0, -1.0])


def test_lava_gradient_finite_differences():
    rng = np.random.default_rng(4)
    checked = 0
    while checked < 20:
        c = rng.normal(size=6)
        z = rng.normal(size=6)
        adj = rng.normal(size=(4, 6))
        margins = (z - adj) @ c
        if np.any(np.abs(margins + 0.1) < 1e-3):
            continue
        _, grad = vd.lava_loss(c, z, adj)
        h = 1e-6
        fd = np.array([
            (vd.lava_loss(c + h * e, z, adj)[0] - vd.lava_loss(c - h * e, z, adj)[0]) / (2 * h)
            for e in np.eye(6)
        ])
        np.testing.assert_allclose(grad, fd, atol=1e-6)
        checked += 1


def test_mse_and_normalized_regret():
    value, grad = vd.mse_loss([1.0, 0.0], [0.0, 0.0])
    assert value == pytest.approx(0.5)
    np.testing.assert_array_equal(grad, [1.0, 0.0])
    assert vd.normalized_regret([1.0, 1.0], [4.0, 6.0]) == pytest.approx(0.2)


def test_errors_are_raised():
    with pytest.raises(vd.VertexdflError):
        vd.lava_loss([1.0], [0.0], [[1.0]], epsilon=-1.0)
    with pytest.raises(RuntimeError):
        vd.generate({"benchmark": {"kind": "random_lp", "bogus": 1}})


def test_pipeline_round_trip(tmp_path):
    config = {
        "benchmark": {"kind": "random_lp", "n_structural": 15, "m": 6},
        "sizes": {"train": 30, "val": 10, "test": 10},
        "out": str(tmp_path),
        "method": "lava",
    }
    run_dir = vd.generate(config, seed=1)
    manifest = json.loads((tmp_path / "random_lp_n15_m6" / "seed1" / "manifest.json").read_text())
    assert run_dir.endswith("seed1")
    assert manifest["seed"] == 1
    assert vd.precompute(config, seed=1) >= 0.0
    report = vd.train(config, seed=1)
    assert report["lp_solve_calls"] == 0
    row = vd.evaluate(config, seed=1)
    assert row["method"] == "lava"
    assert row["regret"] >= 0.0
    with open(tmp_path / "results.csv", newline="") as f:
        lines = list(csv.reader(f))
    assert ",".join(lines[0]) == vd.RESULTS_HEADER
    assert lines[1][:3] == ["random_lp_n15_m6", "lava", "1"]
