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
Log-space transfer-matrix computation of the polymer partition functions.

A log field for layer n is an array of shape (2n+1,)*d whose entry [x_1+n, ..., x_d+n] holds
log Z_n(x) = log E[exp(beta * sum_{i<=n} omega_{i,x_i}); x_n = x]; sites off the even sublattice or outside
the light cone hold -inf. Every step is a logsumexp over the 2d predecessors in a fixed reduction order, so
results are bitwise reproducible.
"""

import math
from dataclasses import dataclass
from typing import Dict, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np

from polymerlab.disorder.environment import Environment, Site, omega_layer
from polymerlab.utils.errors import DomainError
from polymerlab.utils.numeric_functional import log_add_exp_reduce, logsumexp

__all__ = [
    'PolymerParams', 'LogZField', 'Skeleton', 'OccupationField', 'iter_forward_fields', 'forward_fields',
    'log_partition', 'log_partition_p2p', 'log_partition_shifted', 'log_partition_between', 'log_partition_skeleton',
    'endpoint_distribution', 'mean_square_displacement', 'occupation_probabilities', 'max_path_weight'
]

Point = Union[int, Sequence[int]]


@dataclass(frozen=True)
class PolymerParams:
    d: int
    N: int
    beta: float

    def __post_init__(self):
        if self.d not in (1, 2):
            raise DomainError(f'dimension d must be 1 or 2, got {self.d}')
        if int(self.N) < 1:
            raise DomainError(f'path length N must be >= 1, got {self.N}')
        if not (math.isfinite(self.beta) and self.beta >= 0):
            raise DomainError(f'beta must be a finite non-negative real, got {self.beta}')
        object.__setattr__(self, 'N', int(self.N))
        object.__setattr__(self, 'beta', float(self.beta))


def _as_point(x: Point, d: int) -> Tuple[int, ...]:
    if isinstance(x, (int, np.integer)):
        x = (x,)
    x = tuple(int(v) for v in x)
    assert len(x) == d, f'expected a point of dimension {d}, got {x}'
    return x


@dataclass
class LogZField:
    """Per-layer map endpoint -> log partition value (the DP state)."""
    layer: int
    values: np.ndarray

    @property
    def d(self) -> int:
        return self.values.ndim

    def __getitem__(self, x: Point) -> float:
        x = _as_point(x, self.d)
        if max(abs(v) for v in x) > self.layer:
            return -math.inf
        return float(self.values[tuple(v + self.layer for v in x)])

    def items(self) -> Iterator[Tuple[Tuple[int, ...], float]]:
        """Reachable (x, log value) pairs in lexicographic order of x."""
        for idx in np.ndindex(self.values.shape):
            x = tuple(i - self.layer for i in idx)
            if (self.layer + sum(x)) % 2 == 0 and sum(abs(v) for v in x) <= self.layer:
                yield x, float(self.values[idx])

    def log_total(self) -> float:
        return float(logsumexp(self.values))


@dataclass(frozen=True)
class Skeleton:
    """Waypoints of a path at layers 0, n, 2n, ..., kn, starting at the origin."""
    block_length: int
    waypoints: Tuple[Site, ...]

    def __post_init__(self):
        waypoints = tuple(self.waypoints)
        object.__setattr__(self, 'waypoints', waypoints)
        assert self.block_length >= 1, f'block length must be positive, got {self.block_length}'
        assert len(waypoints) >= 1 and waypoints[0] == Site.origin(waypoints[0].d), \
            f'a skeleton starts at the origin, got {waypoints[:1]}'
        for j, site in enumerate(waypoints):
            assert site.n == j * self.block_length, \
                f'waypoint {j} must sit on layer {j * self.block_length}, got {site}'

    @property
    def k(self) -> int:
        return len(self.waypoints) - 1

    @property
    def d(self) -> int:
        return self.waypoints[0].d

    @property
    def endpoint(self) -> Site:
        return self.waypoints[-1]

    def blocks(self) -> List[Tuple[Site, Site]]:
        return list(zip(self.waypoints[:-1], self.waypoints[1:]))

    def is_feasible(self) -> bool:
        n = self.block_length
        for a, b in self.blocks():
            step = sum(abs(u - v) for u, v in zip(a.x, b.x))
            if step > n or (n + step) % 2 != 0:
                return False
        return True


@dataclass
class OccupationField:
    """Gibbs probabilities that the path visits (m, y), for layers m = 1..N."""
    layers: List[np.ndarray]

    @property
    def N(self) -> int:
        return len(self.layers)

    def probability(self, site: Site) -> float:
        if not (1 <= site.n <= self.N) or site.linf > site.n:
            return 0.0
        return float(self.layers[site.n - 1][tuple(v + site.n for v in site.x)])

    def layer_sums(self) -> np.ndarray:
        return np.array([layer.sum() for layer in self.layers])

    def total(self) -> float:
        return float(self.layer_sums().sum())

    def as_dict(self) -> Dict[Site, float]:
        out = {}
        for m, layer in enumerate(self.layers, start=1):
            for idx in zip(*np.nonzero(layer)):
                out[Site(m, tuple(int(i) - m for i in idx))] = float(layer[idx])
        return out


def _neighbor_terms(values: np.ndarray, d: int) -> List[np.ndarray]:
    # entry j of the output width w = width-2 collects values at j+1 -/+ e_axis
    w = values.shape[0] - 2
    terms = []
    for axis in range(d):
        for offset in (0, 2):
            idx = [slice(1, 1 + w)] * d
            idx[axis] = slice(offset, offset + w)
            terms.append(values[tuple(idx)])
    return terms


def _pad(values: np.ndarray, fill: float) -> np.ndarray:
    return np.pad(values, 2, mode='constant', constant_values=fill)


def _window(env: Environment, start: Site, k: int) -> np.ndarray:
    n = start.n + k
    layer = omega_layer(env, n, start.d)
    return layer[tuple(slice(c + n - k, c + n + k + 1) for c in start.x)]


def _check_start(start: Site):
    if start.n < 0 or start.linf > start.n:
        raise DomainError(f'a polymer can only start inside the sampled cone, got {start}')


def iter_forward_fields(env: Environment,
                        d: int,
                        beta: float,
                        steps: int,
                        start: Optional[Site] = None,
                        pins: Optional[Dict[int, Tuple[int, ...]]] = None,
                        with_windows: bool = False,
                        layers: Optional[Sequence[np.ndarray]] = None) -> Iterator[Tuple[int, np.ndarray, np.ndarray]]:
    """Run the forward recursion from ``start`` and yield (k, log field after k steps, omega window).

    Args:
        pins: optional map step k -> relative position the path is forced through at that step.
        with_windows: also yield the disorder window of each step (needed by backward passes).
        layers: precomputed disorder layers 1..steps of a walk started at the origin; replaces sampling from env.
    """
    start = start or Site.origin(d)
    assert start.d == d, f'start {start} is not {d}-dimensional'
    _check_start(start)
    assert layers is None or (start.n == 0 and len(layers) >= steps), \
        'precomputed layers serve walks from the origin only'
    log_step = -math.log(2 * d)
    values = np.zeros((1,) * d)
    for k in range(1, steps + 1):
        values = log_add_exp_reduce(_neighbor_terms(_pad(values, -np.inf), d)) + log_step
        window = None
        if beta != 0.0 or with_windows:
            window = layers[k - 1] if layers is not None else _window(env, start, k)
        if beta != 0.0:
            values = values + beta * window
        if pins and k in pins:
            keep = tuple(v + k for v in pins[k])
            pinned = np.full_like(values, -np.inf)
            if all(0 <= i < values.shape[0] for i in keep):
                pinned[keep] = values[keep]
            values = pinned
        yield k, values, window


def forward_fields(env: Environment, params: PolymerParams) -> List[LogZField]:
    """log Z_n(.) for every layer n = 0..N."""
    fields = [LogZField(0, np.zeros((1,) * params.d))]
    for k, values, _ in iter_forward_fields(env, params.d, params.beta, params.N):
        fields.append(LogZField(k, values))
    return fields


def _final_field(env: Environment, params: PolymerParams, start: Optional[Site] = None, pins=None) -> np.ndarray:
    values = np.zeros((1,) * params.d)
    for _, values, _ in iter_forward_fields(env, params.d, params.beta, params.N, start=start, pins=pins):
        pass
    return values


def log_partition(env: Environment, params: PolymerParams) -> float:
    """log Z_{N,omega}, the point-to-line partition function."""
    if params.beta == 0.0:
        return 0.0
    return float(logsumexp(_final_field(env, params)))


def log_partition_p2p(env: Environment, params: PolymerParams, z: Point) -> float:
    """log Z_{N,omega}(z); -inf exactly when z is unreachable."""
    return LogZField(params.N, _final_field(env, params))[_as_point(z, params.d)]


def log_partition_shifted(env: Environment, params: PolymerParams, origin: Site) -> float:
    """log Z^{(n,x)}_{N,omega}: the point-to-line partition function in the environment translated by origin."""
    _check_start(origin)
    if params.beta == 0.0:
        return 0.0
    return float(logsumexp(_final_field(env, params, start=origin)))


def log_partition_between(env: Environment, start: Site, end: Site, beta: float) -> float:
    """log Z_{m-l,omega}((l,x)(m,y)) for the walk started at start and constrained to end."""
    if start.n >= end.n:
        raise DomainError(f'start layer must precede end layer, got {start} -> {end}')
    assert start.d == end.d, f'dimension mismatch between {start} and {end}'
    steps = end.n - start.n
    rel = tuple(b - a for a, b in zip(start.x, end.x))
    if sum(abs(v) for v in rel) > steps or (steps + sum(rel)) % 2 != 0:
        return -math.inf
    params = PolymerParams(start.d, steps, beta)
    return LogZField(steps, _final_field(env, params, start=start))[rel]


def log_partition_skeleton(env: Environment, params: PolymerParams, skel: Skeleton) -> float:
    """log Z_{N,omega}(S): paths of length N through every waypoint of the skeleton."""
    if params.N % skel.block_length != 0 or skel.endpoint.n > params.N:
        raise DomainError(f'skeleton with block length {skel.block_length} and {skel.k} blocks '
                          f'does not fit paths of length {params.N}')
    if not skel.is_feasible():
        return -math.inf
    pins = {site.n: site.x for site in skel.waypoints[1:]}
    return float(logsumexp(_final_field(env, params, pins=pins)))


def endpoint_distribution(env: Environment, params: PolymerParams) -> Dict[Tuple[int, ...], float]:
    """mu_{N,omega}(x_N = z) for every reachable z."""
    final = LogZField(params.N, _final_field(env, params))
    total = final.log_total()
    return {z: math.exp(value - total) for z, value in final.items()}


def mean_square_displacement(env: Environment, params: PolymerParams) -> float:
    """E_mu |x_N|^2 under the quenched Gibbs measure."""
    return float(sum(p * sum(v * v for v in z) for z, p in endpoint_distribution(env, params).items()))


def occupation_probabilities(env: Environment, params: PolymerParams) -> OccupationField:
    """Forward-backward marginals mu_{N,omega}((m,y) in gamma_N) for 1 <= m <= N."""
    d, beta, N = params.d, params.beta, params.N
    forward, windows = [], []
    for _, values, window in iter_forward_fields(env, d, beta, N, with_windows=True):
        forward.append(values)
        windows.append(window)
    log_z = float(logsumexp(forward[-1]))
    log_step = -math.log(2 * d)

    layers: List[np.ndarray] = [None] * N
    backward = np.zeros_like(forward[-1])
    for m in range(N, 0, -1):
        with np.errstate(invalid='ignore'):
            layers[m - 1] = np.exp(forward[m - 1] + backward - log_z)
        if m > 1:
            weighted = backward + beta * windows[m - 1] if beta != 0.0 else backward
            backward = log_add_exp_reduce(_neighbor_terms(weighted, d)) + log_step
    return OccupationField(layers)


def max_path_weight(env: Environment, params: PolymerParams, absolute: bool = False) -> float:
    """Maximum over directed paths of sum omega (zero-temperature polymer), or of sum |omega|."""
    d = params.d
    values = np.zeros((1,) * d)
    for k in range(1, params.N + 1):
        values = np.maximum.reduce(_neighbor_terms(_pad(values, -np.inf), d))
        layer = omega_layer(env, k, d)
        values = values + (np.abs(layer) if absolute else layer)
    return float(values.max())
