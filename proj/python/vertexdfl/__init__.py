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

"""Python access to the vertexdfl core.

LPs are plain dicts in the LP JSON layout ({A, b, sense, n_structural, names});
configs are dicts in the CLI config layout.
"""

import json

import numpy as np

from . import _core
from ._core import VertexdflError, min_bases_bound, normalized_regret, RESULTS_HEADER

__all__ = [
    "VertexdflError",
    "RESULTS_HEADER",
    "gen_random_lp",
    "solve_lp",
    "adjacent_vertices",
    "min_bases_bound",
    "lava_loss",
    "mse_loss",
    "normalized_regret",
    "generate",
    "precompute",
    "train",
    "evaluate",
]


def gen_random_lp(n_structural, m, seed):
    return json.loads(_core.gen_random_lp(n_structural, m, seed))


def _vec(x):
    return np.asarray(x, dtype=np.float64)


def solve_lp(lp, cost):
    return _core.solve_lp(json.dumps(lp), _vec(cost))


def adjacent_vertices(lp, cost):
    """Vertex optimal for cost plus its adjacent vertices (one per row)."""
    return _core.adjacent_vertices(json.dumps(lp), _vec(cost))


def lava_loss(c_hat, z_star, z_adj, epsilon=0.1, maximize=False):
    z_adj = np.atleast_2d(np.asarray(z_adj, dtype=np.float64))
    return _core.lava_loss(_vec(c_hat), _vec(z_star), z_adj, float(epsilon), maximize)


def mse_loss(c_hat, c):
    return _core.mse_loss(_vec(c_hat), _vec(c))


def generate(config, seed=0):
    return _core.generate(json.dumps(config), seed)


def precompute(config, seed=0):
    return _core.precompute(json.dumps(config), seed)


def train(config, seed=0):
    return _core.train(json.dumps(config), seed)


def evaluate(config, seed=0):
    return _core.evaluate(json.dumps(config), seed)
