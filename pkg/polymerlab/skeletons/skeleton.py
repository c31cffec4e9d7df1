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
Simple skeletons: a path seen only at the layers 0, n, 2n, ..., kn.

Every path from the origin to (kn, z) has exactly one simple skeleton, so the partition function to
(kn, z) is the sum over skeletons of the skeleton-constrained partition functions, and each of those
factorizes over blocks by the Markov property of the walk.
"""

import itertools
import math
from dataclasses import dataclass
from typing import Dict, Iterable, List, Sequence, Tuple, Union

import numpy as np

from polymerlab.disorder.environment import Environment, Site
from polymerlab.polymer.transfer import (PolymerParams, Skeleton, log_partition_between, log_partition_p2p,
                                         log_partition_skeleton)
from polymerlab.utils.errors import DomainError, ResourceCapExceeded
from polymerlab.utils.numeric_functional import logsumexp

__all__ = [
    'ScaleFns', 'scale_functions', 'simple_skeleton', 'block_increments', 'count_skeletons', 'enumerate_skeletons',
    'decomposition_check', 'block_factorization_residual', 'is_coarse_grained', 'coarse_grained_skeletons',
    'DEFAULT_MAX_ENUMERATION'
]

DEFAULT_MAX_ENUMERATION = 10**6
# floor((log m)^3) must not lose an integer to roundoff, e.g. m = e^2
_FLOOR_GUARD = 1e-12


@dataclass(frozen=True)
class ScaleFns:
    """Slowly varying scale functions rho, theta, phi of the coarse-graining, defined for m >= 3."""
    K13: float = 1.0
    theta_exponent: float = 2.5
    phi_exponent: float = 3.0

    def __post_init__(self):
        if not (self.K13 > 0 and self.theta_exponent > 0 and self.phi_exponent > 0):
            raise DomainError(f'scale function constants must be positive, got {self}')

    @staticmethod
    def _log(m: float) -> float:
        if not m >= 3:
            raise DomainError(f'scale functions need m >= 3 (log log m > 0), got m={m}')
        return math.log(m)

    def rho(self, m: float) -> float:
        lm = self._log(m)
        return math.log(lm) / (self.K13 * math.sqrt(lm))

    def theta(self, m: float) -> float:
        return self._log(m)**self.theta_exponent

    def phi(self, m: float) -> int:
        v = self._log(m)**self.phi_exponent
        return int(math.floor(v * (1.0 + _FLOOR_GUARD)))

    def __call__(self, m: float) -> Tuple[float, float, int]:
        return self.rho(m), self.theta(m), self.phi(m)

    def adequacy_threshold(self, n: int) -> float:
        return math.sqrt(n) * self.theta(n)

    def efficiency_threshold(self, n: int) -> float:
        return 4.0 * math.sqrt(n) * self.rho(n)


def scale_functions(m: float, K13: float = 1.0) -> Tuple[float, float, int]:
    """(rho(m), theta(m), phi(m)) with the default exponents."""
    return ScaleFns(K13=K13)(m)


def simple_skeleton(path: Sequence[Site], n: int) -> Skeleton:
    """Waypoints of a path (vertices at layers 0..N, starting at the origin) at the multiples of n."""
    path = list(path)
    assert path and path[0] == Site.origin(path[0].d), f'a path starts at the origin, got {path[:1]}'
    for i, site in enumerate(path):
        assert site.n == i, f'vertex {i} of the path sits on layer {site.n}'
    length = len(path) - 1
    if n < 1 or length % n != 0:
        raise DomainError(f'path length {length} is not divisible by the block length {n}')
    return Skeleton(n, tuple(path[::n]))


def block_increments(d: int, n: int) -> List[Tuple[int, ...]]:
    """All x with |x|_1 <= n and x_1 + ... + x_d = n mod 2, in lexicographic order."""
    return [dx for dx in itertools.product(range(-n, n + 1), repeat=d)
            if sum(abs(v) for v in dx) <= n and (sum(dx) - n) % 2 == 0]


def _as_endpoint(endpoint: Union[Site, int, Sequence[int]], d: int, n: int, k: int) -> Tuple[int, ...]:
    if isinstance(endpoint, Site):
        if endpoint.n != k * n:
            raise DomainError(f'endpoint {endpoint} must lie on layer k*n = {k * n}')
        return endpoint.x
    x = (endpoint,) if isinstance(endpoint, (int, np.integer)) else tuple(endpoint)
    assert len(x) == d, f'endpoint {x} is not {d}-dimensional'
    return tuple(int(v) for v in x)


def count_skeletons(d: int, n: int, k: int, endpoint: Union[Site, int, Sequence[int]]) -> int:
    """Number of feasible skeletons from the origin to (kn, endpoint), by dynamic programming over blocks."""
    target = _as_endpoint(endpoint, d, n, k)
    steps = block_increments(d, n)
    counts: Dict[Tuple[int, ...], int] = {(0,) * d: 1}
    for _ in range(k):
        nxt: Dict[Tuple[int, ...], int] = {}
        for x, c in counts.items():
            for dx in steps:
                y = tuple(a + b for a, b in zip(x, dx))
                nxt[y] = nxt.get(y, 0) + c
        counts = nxt
    return counts.get(target, 0)


def enumerate_skeletons(d: int,
                        n: int,
                        k: int,
                        endpoint: Union[Site, int, Sequence[int]],
                        max_count: int = DEFAULT_MAX_ENUMERATION) -> List[Skeleton]:
    """All simple skeletons with block length n and k blocks from the origin to (kn, endpoint).

    Raises:
        ResourceCapExceeded: when the exact count exceeds ``max_count``.
    """
    if n < 1 or k < 1:
        raise DomainError(f'block length and block count must be positive, got n={n}, k={k}')
    target = _as_endpoint(endpoint, d, n, k)
    count = count_skeletons(d, n, k, target)
    if count > max_count:
        raise ResourceCapExceeded('skeleton enumeration', count, max_count)
    steps = block_increments(d, n)
    out: List[Skeleton] = []

    def extend(prefix: List[Tuple[int, ...]]):
        j = len(prefix) - 1
        x = prefix[-1]
        if j == k:
            if x == target:
                out.append(Skeleton(n, tuple(Site(i * n, p) for i, p in enumerate(prefix))))
            return
        for dx in steps:
            y = tuple(a + b for a, b in zip(x, dx))
            if sum(abs(a - b) for a, b in zip(target, y)) <= (k - j - 1) * n:
                extend(prefix + [y])

    extend([(0,) * d])
    assert len(out) == count, f'enumerated {len(out)} skeletons, counted {count}'
    return out


def block_factorization_residual(env: Environment, params: PolymerParams, skel: Skeleton) -> float:
    """|log Z(S) - sum over blocks of log Z_between|; 0 for infeasible skeletons (both sides -inf)."""
    direct = log_partition_skeleton(env, params, skel)
    blocks = sum(log_partition_between(env, a, b, params.beta) for a, b in skel.blocks())
    if direct == -math.inf and blocks == -math.inf:
        return 0.0
    return abs(direct - blocks)


def decomposition_check(env: Environment,
                        params: PolymerParams,
                        n: int,
                        endpoint: Union[int, Sequence[int], None] = None,
                        max_count: int = DEFAULT_MAX_ENUMERATION) -> float:
    """|logsumexp over skeletons of log Z(S) - log Z_N(endpoint)|, an exact identity up to roundoff."""
    if n < 1 or params.N % n != 0:
        raise DomainError(f'block length {n} does not divide N={params.N}')
    endpoint = (0,) * params.d if endpoint is None else endpoint
    skels = enumerate_skeletons(params.d, n, params.N // n, endpoint, max_count=max_count)
    target = log_partition_p2p(env, params, endpoint)
    if not skels:
        return 0.0 if target == -math.inf else math.inf
    total = float(logsumexp(np.array([log_partition_skeleton(env, params, s) for s in skels])))
    return abs(total - target)


def is_coarse_grained(skel: Skeleton, u: int) -> bool:
    """All waypoints lie on the coarse grid u * Z^d."""
    assert u >= 1, f'coarse-graining scale must be positive, got {u}'
    return all(v % u == 0 for site in skel.waypoints for v in site.x)


def coarse_grained_skeletons(skels: Iterable[Skeleton], u: int) -> List[Skeleton]:
    return [s for s in skels if is_coarse_grained(s, u)]
