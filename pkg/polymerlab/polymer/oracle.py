# Copyright 2026 The polymerlab Authors
#
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
"""
Exact enumeration over every nearest-neighbour path; the reference every DP operation is tested against.
"""

import math
from typing import Optional, Sequence, Union

import numpy as np

from polymerlab.disorder.environment import Environment, omega_layer
from polymerlab.polymer.transfer import PolymerParams, Skeleton
from polymerlab.utils.errors import ResourceCapExceeded
from polymerlab.utils.numeric_functional import logsumexp

__all__ = ['brute_force_log_partition', 'DEFAULT_MAX_PATHS']

DEFAULT_MAX_PATHS = 10**7
_CHUNK = 1 << 16


def _unit_steps(d: int) -> np.ndarray:
    steps = np.zeros((2 * d, d), dtype=np.int64)
    for axis in range(d):
        steps[2 * axis, axis] = 1
        steps[2 * axis + 1, axis] = -1
    return steps


def brute_force_log_partition(env: Environment,
                              params: PolymerParams,
                              constraint: Optional[Union[Skeleton, int, Sequence[int]]] = None,
                              max_paths: int = DEFAULT_MAX_PATHS) -> float:
    """log Z by summing exp(beta * sum omega) over all (2d)^N paths.

    Args:
        constraint: ``None`` for the point-to-line value, an endpoint z for the point-to-point value, or a
            Skeleton whose waypoints every counted path must visit.
        max_paths: refuse (ResourceCapExceeded) when (2d)^N exceeds this.
    """
    d, N, beta = params.d, params.N, params.beta
    n_paths = (2 * d)**N
    if n_paths > max_paths:
        raise ResourceCapExceeded('brute force path enumeration', n_paths, max_paths)

    pins = {}
    if isinstance(constraint, Skeleton):
        pins = {site.n: np.array(site.x) for site in constraint.waypoints[1:]}
    elif constraint is not None:
        z = (constraint,) if isinstance(constraint, (int, np.integer)) else tuple(constraint)
        assert len(z) == d, f'endpoint {z} is not {d}-dimensional'
        pins = {N: np.array(z)}
    if any(layer > N for layer in pins):
        return -math.inf

    steps = _unit_steps(d)
    layers = [omega_layer(env, n, d) for n in range(1, N + 1)] if beta != 0.0 else []
    powers = (2 * d)**np.arange(N, dtype=np.int64)

    chunk_totals = []
    for begin in range(0, n_paths, _CHUNK):
        idx = np.arange(begin, min(begin + _CHUNK, n_paths), dtype=np.int64)
        digits = (idx[:, None] // powers[None, :]) % (2 * d)
        positions = np.cumsum(steps[digits], axis=1)  # (paths, N, d)

        energy = np.zeros(len(idx))
        for n, layer in enumerate(layers, start=1):
            energy += layer[tuple(positions[:, n - 1, i] + n for i in range(d))]
        log_weight = beta * energy

        keep = np.ones(len(idx), dtype=bool)
        for layer_n, x in pins.items():
            keep &= np.all(positions[:, layer_n - 1, :] == x, axis=1)
        if keep.any():
            chunk_totals.append(float(logsumexp(log_weight[keep])))

    if not chunk_totals:
        return -math.inf
    return float(logsumexp(np.array(chunk_totals))) - N * math.log(2 * d)
