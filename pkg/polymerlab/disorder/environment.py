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
Counter-based disorder environment.

``omega(n, x)`` is a pure function of (model, base_seed, replica_index, n, x): every site owns one Philox4x64-10
block, keyed on (base_seed, replica_index) with counter (n, code(x), stream, d). A single site costs one block, a
whole layer is the same computation vectorised over the sites of the box, and nothing of size O(N^{d+1}) is ever
stored. Blocks are bit-identical to ``numpy.random.Philox`` at the same key and counter.
Uniforms follow the 53-bit mantissa convention u = (k + 1/2) * 2**-53 with k the top 53 bits of word 0.
"""

import dataclasses
from dataclasses import dataclass, field
from typing import Dict, Mapping, Sequence, Tuple

import numpy as np

from polymerlab.disorder.models import DisorderModel
from polymerlab.utils.errors import DomainError

__all__ = ['Site', 'Environment', 'omega', 'omega_layer', 'resample_site', 'mirror_environment', 'philox_block']

_U64 = 0xFFFF_FFFF_FFFF_FFFF
_BASE_STREAM = 0
_RESAMPLE_STREAM = 1

_PHILOX_M = (np.uint64(0xD2E7470EE14C6C93), np.uint64(0xCA5A826395121157))
_PHILOX_W = (0x9E3779B97F4A7C15, 0xBB67AE8584CAA73B)
_PHILOX_ROUNDS = 10
_LO32 = np.uint64(0xFFFF_FFFF)
_S32 = np.uint64(32)


@dataclass(frozen=True, order=True)
class Site:
    """A space-time point (n, x) with x in Z^d."""
    n: int
    x: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, 'n', int(self.n))
        x = self.x
        if isinstance(x, (int, np.integer)):
            x = (x,)
        object.__setattr__(self, 'x', tuple(int(v) for v in x))

    @classmethod
    def origin(cls, d: int) -> 'Site':
        return cls(0, (0,) * d)

    @property
    def d(self) -> int:
        return len(self.x)

    @property
    def l1(self) -> int:
        return sum(abs(v) for v in self.x)

    @property
    def linf(self) -> int:
        return max((abs(v) for v in self.x), default=0)

    def is_even(self) -> bool:
        return (self.n + sum(self.x)) % 2 == 0

    def is_reachable(self) -> bool:
        """On the even sublattice and inside the light cone of the origin."""
        return self.n >= 0 and self.is_even() and self.l1 <= self.n

    def shifted(self, by: 'Site') -> 'Site':
        return Site(self.n + by.n, tuple(a + b for a, b in zip(self.x, by.x)))


@dataclass(frozen=True)
class Environment:
    """An immutable disorder field. Overrides replace single coordinates (resampling, finite differences)."""
    model: DisorderModel
    base_seed: int
    replica_index: int = 0
    overrides: Mapping[Site, float] = field(default_factory=dict)
    reflection: bool = False

    def __post_init__(self):
        if not (0 <= int(self.base_seed) <= _U64):
            raise DomainError(f'base_seed must be a 64-bit unsigned integer, got {self.base_seed}')
        if not (0 <= int(self.replica_index) <= _U64):
            raise DomainError(f'replica_index must be a 64-bit unsigned integer, got {self.replica_index}')
        object.__setattr__(self, 'base_seed', int(self.base_seed))
        object.__setattr__(self, 'replica_index', int(self.replica_index))
        object.__setattr__(self, 'overrides', dict(self.overrides))

    def with_overrides(self, values: Mapping[Site, float]) -> 'Environment':
        merged = dict(self.overrides)
        merged.update({site: float(v) for site, v in values.items()})
        return dataclasses.replace(self, overrides=merged)


def _mulhilo(a: np.uint64, b: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """High and low 64-bit words of the 128-bit products a * b."""
    a_lo, a_hi = a & _LO32, a >> _S32
    b_lo, b_hi = b & _LO32, b >> _S32
    p0, p1, p2, p3 = a_lo * b_lo, a_lo * b_hi, a_hi * b_lo, a_hi * b_hi
    carry = ((p0 >> _S32) + (p1 & _LO32) + (p2 & _LO32)) >> _S32
    return p3 + (p1 >> _S32) + (p2 >> _S32) + carry, a * b


def philox_block(key: Sequence[int], counter: Sequence[np.ndarray]) -> Tuple[np.ndarray, ...]:
    """Philox4x64-10 applied elementwise to counters (c0, c1, c2, c3) under a fixed 2-word key.

    Returns:
        the four output words, each shaped like the counters.
    """
    c0, c1, c2, c3 = (np.asarray(c, dtype=np.uint64) for c in counter)
    k0, k1 = int(key[0]) & _U64, int(key[1]) & _U64
    with np.errstate(over='ignore'):
        for i in range(_PHILOX_ROUNDS):
            if i:
                k0, k1 = (k0 + _PHILOX_W[0]) & _U64, (k1 + _PHILOX_W[1]) & _U64
            hi0, lo0 = _mulhilo(_PHILOX_M[0], c0)
            hi1, lo1 = _mulhilo(_PHILOX_M[1], c2)
            c0, c1, c2, c3 = hi1 ^ c1 ^ np.uint64(k0), lo1, hi0 ^ c3 ^ np.uint64(k1), lo0
    return c0, c1, c2, c3


def _site_codes(xs: np.ndarray) -> np.ndarray:
    """Pack rows of 32-bit signed coordinates into one 64-bit word (d <= 2)."""
    codes = np.zeros(xs.shape[0], dtype=np.uint64)
    for j in range(xs.shape[1]):
        shifted = (xs[:, j].astype(np.int64) + (1 << 31)).astype(np.uint64) & _LO32
        codes = (codes << _S32) | shifted
    return codes


def _site_uniforms(key: Sequence[int], n: int, xs: np.ndarray, stream: int) -> np.ndarray:
    m, d = xs.shape
    counter = (np.full(m, n, dtype=np.uint64), _site_codes(xs), np.full(m, stream, dtype=np.uint64),
               np.full(m, d, dtype=np.uint64))
    word = philox_block(key, counter)[0]
    return ((word >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0**-53


def _box(n: int, d: int) -> np.ndarray:
    axis = np.arange(-n, n + 1)
    return np.stack(np.meshgrid(*([axis] * d), indexing='ij'), axis=-1).reshape(-1, d)


def omega_layer(env: Environment, n: int, d: int) -> np.ndarray:
    """All draws of layer n on the box |x|_inf <= n.

    Returns:
        array of shape (2n+1,)*d where entry [x_1+n, ..., x_d+n] holds omega(n, x).
    """
    assert n >= 1, f'layers start at n=1, got {n}'
    xs = _box(n, d)
    if env.reflection:
        xs = -xs
    u = _site_uniforms((env.base_seed, env.replica_index), n, xs, _BASE_STREAM)
    layer = env.model.quantile(u).reshape((2 * n + 1,) * d)
    for site, value in env.overrides.items():
        if site.n == n and site.d == d and site.linf <= n:
            layer[tuple(v + n for v in site.x)] = value
    return layer


def omega(env: Environment, site: Site) -> float:
    """The disorder value at one site; defined for every x, inside the light cone or not."""
    if site.n < 1:
        raise DomainError(f'the environment lives on layers n >= 1, got {site}')
    if site in env.overrides:
        return float(env.overrides[site])
    x = tuple(-v for v in site.x) if env.reflection else site.x
    u = _site_uniforms((env.base_seed, env.replica_index), site.n, np.array([x], dtype=np.int64), _BASE_STREAM)
    return float(env.model.quantile(u)[0])


def fresh_draw(model: DisorderModel, site: Site, fresh_seed: int) -> float:
    """An independent draw for one coordinate, keyed on (fresh_seed, site)."""
    u = _site_uniforms((int(fresh_seed) & _U64, 0), site.n, np.array([site.x], dtype=np.int64), _RESAMPLE_STREAM)
    return float(model.quantile(u)[0])


def resample_site(env: Environment, site: Site, fresh_seed: int) -> Environment:
    """A copy of env whose coordinate at site carries an independent fresh draw; env itself is untouched."""
    if site.n < 1:
        raise DomainError(f'cannot resample {site}: the environment lives on layers n >= 1')
    return env.with_overrides({site: fresh_draw(env.model, site, fresh_seed)})


def mirror_environment(env: Environment) -> Environment:
    """The environment reflected through x -> -x."""
    mirrored: Dict[Site, float] = {Site(s.n, tuple(-v for v in s.x)): val for s, val in env.overrides.items()}
    return dataclasses.replace(env, reflection=not env.reflection, overrides=mirrored)
