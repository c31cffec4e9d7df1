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
Inefficiency surface s(n, x) = n p(beta) - E log Z_n(x) and the adequate/efficient classification.

The plug-in p_hat <= p(beta) makes every s_hat an overestimate of s, i.e. the labels are conservative:
a site reported adequate or efficient stays so under the true free energy.
"""

import functools
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from polymerlab.disorder.environment import Environment, Site
from polymerlab.disorder.models import DisorderModel
from polymerlab.estimators.replicas import InequalityCheck
from polymerlab.polymer.transfer import LogZField, PolymerParams, iter_forward_fields, log_partition_between
from polymerlab.skeletons.skeleton import ScaleFns
from polymerlab.utils.errors import DomainError
from polymerlab.utils.logging_utils import get_logger
from polymerlab.workers.replica_pool import ReplicaPool, resolve_pool

__all__ = [
    'SEntry', 'SMap', 'Classification', 's_map', 'classify', 'subadditivity_check', 'origin_inefficiency_table'
]

logger = get_logger(__file__)

BIAS_NOTE = 's_hat uses the lower-biased p_hat, so it overestimates s and the labels are conservative'


@dataclass
class SEntry:
    s_hat: float
    stderr: float


@dataclass
class SMap:
    n: int
    beta: float
    p_hat: float
    R: int
    entries: Dict[Tuple[int, ...], SEntry]
    notes: List[str] = field(default_factory=lambda: [BIAS_NOTE])

    def __getitem__(self, x) -> SEntry:
        return self.entries[(x,) if isinstance(x, int) else tuple(x)]

    def to_frame(self) -> pd.DataFrame:
        rows = []
        for x, e in sorted(self.entries.items()):
            row = {'n': self.n}
            row.update({f'x{i + 1}': v for i, v in enumerate(x)})
            row.update({'s_hat': e.s_hat, 'stderr': e.stderr})
            rows.append(row)
        return pd.DataFrame(rows)


@dataclass
class Classification:
    n: int
    adequate: List[Tuple[int, ...]]
    efficient: List[Tuple[int, ...]]
    h_n: int
    u_n: int
    u_clamped: bool
    adequacy_threshold: float
    efficiency_threshold: float
    notes: List[str] = field(default_factory=list)


def _endpoint_field(r: int, model: DisorderModel, n: int, beta: float, d: int, base_seed: int) -> np.ndarray:
    env = Environment(model, base_seed, r)
    values = None
    for _, values, _ in iter_forward_fields(env, d, beta, n):
        pass
    return values


def s_map(model: DisorderModel,
          n: int,
          beta: float,
          R: int,
          p_hat: float,
          base_seed: int = 0,
          d: int = 1,
          pool: Optional[ReplicaPool] = None) -> SMap:
    """s_hat(n, x) = n p_hat - mean_r log Z_n(x) for every reachable x; one forward pass per replica."""
    if n < 3:
        raise DomainError(f'the s-map needs n >= 3, got {n}')
    if R < 2:
        raise DomainError(f'need at least 2 replicas for standard errors, got R={R}')
    kernel = functools.partial(_endpoint_field, model=model, n=n, beta=beta, d=d, base_seed=base_seed)
    fields = resolve_pool(pool).map(kernel, range(R))
    keys = [x for x, _ in LogZField(n, fields[0]).items()]
    samples = np.array([[value for _, value in LogZField(n, f).items()] for f in fields])  # (R, sites)
    means = samples.mean(axis=0)
    stderrs = samples.std(axis=0, ddof=1) / math.sqrt(R)
    entries = {x: SEntry(float(n * p_hat - m), float(se)) for x, m, se in zip(keys, means, stderrs)}
    return SMap(n=n, beta=beta, p_hat=float(p_hat), R=R, entries=entries)


def classify(smap: SMap, scale: ScaleFns, efficiency_map: Optional[SMap] = None) -> Classification:
    """Adequate iff s_hat <= sqrt(n) theta(n); efficient iff s_hat <= 4 sqrt(n) rho(n).

    Args:
        efficiency_map: s-map at another block length m whose sites are tested against the efficiency
            threshold at n; defaults to ``smap`` itself (m = n).
    """
    assert smap.entries, 'empty s-map'
    n = smap.n
    adequacy = scale.adequacy_threshold(n)
    efficiency = scale.efficiency_threshold(n)
    adequate = sorted(x for x, e in smap.entries.items() if e.s_hat <= adequacy)
    efficient = sorted(x for x, e in (efficiency_map or smap).entries.items() if e.s_hat <= efficiency)
    notes = list(smap.notes)
    if efficiency_map is None or efficiency_map.n == n:
        # same block length: efficient sites are a subset of adequate ones
        adequate_set = set(adequate)
        dropped = [x for x in efficient if x not in adequate_set]
        if dropped:
            notes.append(f'{len(dropped)} efficient sites are not adequate at n={n}; removed from the efficient set')
            efficient = [x for x in efficient if x in adequate_set]
    elif not set(efficient) <= set(adequate):
        notes.append(f'efficient sites come from an m={efficiency_map.n} map and are not a subset of the adequate set')
    if len(adequate) == len(smap.entries):
        notes.append(f'every site is adequate at n={n}: sqrt(n) theta(n) = {adequacy:.4g} dominates the s-map')
    if not adequate:
        notes.append('no adequate site; h_n set to 0')
    h_n = max((max(abs(v) for v in x) for x in adequate), default=0)
    u_n = 2 * (h_n // (2 * scale.phi(n)))
    clamped = u_n < 2
    if clamped:
        logger.warning(f'coarse-graining scale 2*floor(h_n/(2 phi(n))) = {u_n} at n={n}, h_n={h_n}; clamped to 2')
        notes.append(f'u_n clamped from {u_n} to 2')
        u_n = 2
    return Classification(n=n,
                          adequate=adequate,
                          efficient=efficient,
                          h_n=h_n,
                          u_n=u_n,
                          u_clamped=clamped,
                          adequacy_threshold=adequacy,
                          efficiency_threshold=efficiency,
                          notes=notes)


def _subadditivity_terms(r: int, model: DisorderModel, n: int, beta: float, x: Tuple[int, ...], base_seed: int):
    env = Environment(model, base_seed, r)
    d = len(x)
    fields = {}
    for k, values, _ in iter_forward_fields(env, d, beta, 2 * n):
        if k in (n, 2 * n):
            fields[k] = LogZField(k, values)
    rhs = fields[n][x] + log_partition_between(env, Site(n, x), Site(2 * n, (0,) * d), beta)
    return fields[2 * n][(0,) * d], rhs


def subadditivity_check(model: DisorderModel,
                        n: int,
                        beta: float,
                        x: Union[int, Sequence[int]],
                        R: int,
                        base_seed: int = 0,
                        pool: Optional[ReplicaPool] = None) -> InequalityCheck:
    """log Z_{2n}(0) >= log Z_n(x) + log Z_between((n,x),(2n,0)) per replica, averaged over replicas."""
    x = (x,) if isinstance(x, int) else tuple(x)
    kernel = functools.partial(_subadditivity_terms, model=model, n=n, beta=beta, x=x, base_seed=base_seed)
    values = np.array(resolve_pool(pool).map(kernel, range(R)))
    return InequalityCheck.from_samples(f'subadditivity n={n} x={x}', values[:, 0], values[:, 1])


def origin_inefficiency_table(model: DisorderModel,
                              n_grid: Sequence[int],
                              beta: float,
                              R: int,
                              p_hat: float,
                              base_seed: int = 0,
                              d: int = 1,
                              pool: Optional[ReplicaPool] = None) -> pd.DataFrame:
    """s_hat(n, 0) / (sqrt(n) log n) over an n-grid of even block lengths.

    Bounded ratios are the desk-scale form of s(n, 0) = O(sqrt(n) log n).
    """
    odd = [n for n in n_grid if n % 2]
    if odd:
        raise DomainError(f'the origin is unreachable at odd block lengths {odd}')
    rows = []
    for n in n_grid:
        entry = s_map(model, n, beta, R, p_hat, base_seed=base_seed, d=d, pool=pool)[(0,) * d]
        scale = math.sqrt(n) * math.log(n)
        rows.append({'n': n, 's_hat': entry.s_hat, 'stderr': entry.stderr, 'ratio': entry.s_hat / scale,
                     'ratio_stderr': entry.stderr / scale})
    return pd.DataFrame(rows)
