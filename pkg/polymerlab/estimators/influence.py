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
Single-site influence of the disorder on log Z.

For a site (m, y), Y^{(m,y)} = E~|F(omega with omega_{m,y} resampled) - F(omega)| where the average runs over an
independent copy of the coordinate. It is estimated per replica from ``resamples`` fresh draws, and the
report gives second moments over replicas. The point-to-point functional L = log Z_N(z) additionally
splits into positive and negative parts.
"""

import functools
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from polymerlab.disorder.environment import Environment, Site, fresh_draw, omega, omega_layer
from polymerlab.disorder.models import DisorderModel, log_mgf
from polymerlab.polymer.transfer import LogZField, PolymerParams, iter_forward_fields, occupation_probabilities
from polymerlab.utils.logging_utils import get_logger
from polymerlab.utils.numeric_functional import logsumexp
from polymerlab.workers.replica_pool import ReplicaPool, resolve_pool

__all__ = [
    'SiteInfluence', 'InfluenceReport', 'influence_bound', 'resample_seed', 'site_influence',
    'CorrelationCheck', 'negative_correlation_probe'
]

logger = get_logger(__file__)


@dataclass
class Moment:
    value: float
    stderr: float

    @classmethod
    def second(cls, samples: np.ndarray) -> 'Moment':
        sq = samples**2
        stderr = float(sq.std(ddof=1) / math.sqrt(len(sq))) if len(sq) > 1 else 0.0
        return cls(float(sq.mean()), stderr)


@dataclass
class SiteInfluence:
    site: Site
    reachable: bool
    Y2: Moment
    L2: Optional[Moment] = None
    L2_plus: Optional[Moment] = None
    L2_minus: Optional[Moment] = None


@dataclass
class InfluenceReport:
    params: PolymerParams
    endpoint: Optional[Tuple[int, ...]]
    R: int
    resamples: int
    sites: List[SiteInfluence]
    # E[(sum of Y over the selected sites)^2]: the selected part of Y_N
    Y_sum2: Moment
    bound: float
    notes: List[str] = field(default_factory=list)

    @property
    def rho_hat(self) -> float:
        """sqrt of the largest E[(Y^{(m,y)})^2] over the selected sites."""
        return math.sqrt(max(s.Y2.value for s in self.sites))

    def to_frame(self) -> pd.DataFrame:
        rows = []
        for s in self.sites:
            row = {'n': s.site.n, 'x': list(s.site.x), 'reachable': s.reachable, 'Y2': s.Y2.value,
                   'Y2_stderr': s.Y2.stderr}
            for name in ('L2', 'L2_plus', 'L2_minus'):
                moment = getattr(s, name)
                row[name] = moment.value if moment else math.nan
                row[f'{name}_stderr'] = moment.stderr if moment else math.nan
            rows.append(row)
        return pd.DataFrame(rows)


@dataclass
class CorrelationCheck:
    """Sample covariance of two per-replica observables, expected to be <= 0."""
    name: str
    R: int
    covariance: float
    stderr: float

    def holds(self, k: float = 3.0) -> bool:
        return self.covariance <= k * self.stderr


def influence_bound(model: DisorderModel, beta: float) -> float:
    """exp(lambda(-2 beta) + 2 lambda(beta)), the bound on the positive-part point-to-point second moment."""
    return math.exp(log_mgf(model, -2.0 * beta) + 2.0 * log_mgf(model, beta))


def resample_seed(base_seed: int, replica: int, k: int, tag: int) -> int:
    """Independent 64-bit seed for resample k of replica r; tag separates sites."""
    return int(np.random.SeedSequence([base_seed, replica, k, tag]).generate_state(1, dtype=np.uint64)[0])


def _functionals(layers: Sequence[np.ndarray], params: PolymerParams, z: Optional[Tuple[int, ...]]):
    final = None
    for _, final, _ in iter_forward_fields(None, params.d, params.beta, params.N, layers=layers):
        pass
    F = float(logsumexp(final))
    L = None
    if z is not None:
        L = LogZField(params.N, final)[z]
    return F, L


def _replica_influence(r: int, model: DisorderModel, params: PolymerParams, sites: Tuple[Site, ...],
                       z: Optional[Tuple[int, ...]], resamples: int, base_seed: int):
    env = Environment(model, base_seed, r)
    layers = [omega_layer(env, n, params.d) for n in range(1, params.N + 1)]
    F0, L0 = _functionals(layers, params, z)
    out = np.zeros((len(sites), 4))
    for j, site in enumerate(sites):
        if not (site.is_reachable() and 1 <= site.n <= params.N):
            continue
        dF, dL = np.zeros(resamples), np.zeros(resamples)
        for k in range(resamples):
            value = fresh_draw(model, site, resample_seed(base_seed, r, k, j + 1))
            changed = list(layers)
            changed[site.n - 1] = layers[site.n - 1].copy()
            changed[site.n - 1][tuple(v + site.n for v in site.x)] = value
            F1, L1 = _functionals(changed, params, z)
            dF[k] = F1 - F0
            if z is not None and L0 != -math.inf:
                dL[k] = L1 - L0
        out[j] = [np.abs(dF).mean(), np.abs(dL).mean(), np.maximum(dL, 0).mean(), np.maximum(-dL, 0).mean()]
    return out


def site_influence(model: DisorderModel,
                   params: PolymerParams,
                   site: Union[Site, Sequence[Site]],
                   z: Union[int, Sequence[int], None] = None,
                   R: int = 1000,
                   resamples_per_replica: int = 4,
                   base_seed: int = 0,
                   pool: Optional[ReplicaPool] = None) -> InfluenceReport:
    """Second moments of the single-site sensitivities of log Z_N (and of log Z_N(z) when z is given).

    Args:
        site: one site or a list of them.
        z: endpoint of the point-to-point functional; None skips it.
        resamples_per_replica: independent draws averaged per replica for the inner expectation.
    """
    sites = (site,) if isinstance(site, Site) else tuple(site)
    if z is not None:
        z = (z,) if isinstance(z, (int, np.integer)) else tuple(int(v) for v in z)
        assert len(z) == params.d, f'endpoint {z} is not {params.d}-dimensional'
    notes = []
    for s in sites:
        if not (s.is_reachable() and 1 <= s.n <= params.N):
            logger.warning(f'{s} is outside the reachable cone of paths of length {params.N}; influence is zero')
            notes.append(f'{s} unreachable: zero influence')
    if params.beta == 0.0:
        notes.append('beta = 0: log Z does not depend on the disorder')

    kernel = functools.partial(_replica_influence, model=model, params=params, sites=sites, z=z,
                               resamples=resamples_per_replica, base_seed=base_seed)
    samples = np.stack(resolve_pool(pool).map(kernel, range(R)))  # (R, sites, 4)

    infos = []
    for j, s in enumerate(sites):
        info = SiteInfluence(site=s, reachable=s.is_reachable() and 1 <= s.n <= params.N,
                             Y2=Moment.second(samples[:, j, 0]))
        if z is not None:
            info.L2 = Moment.second(samples[:, j, 1])
            info.L2_plus = Moment.second(samples[:, j, 2])
            info.L2_minus = Moment.second(samples[:, j, 3])
        infos.append(info)
    return InfluenceReport(params=params,
                           endpoint=z,
                           R=R,
                           resamples=resamples_per_replica,
                           sites=infos,
                           Y_sum2=Moment.second(samples[:, :, 0].sum(axis=1)),
                           bound=influence_bound(model, params.beta),
                           notes=notes)


def _correlation_terms(r: int, model: DisorderModel, params: PolymerParams, site: Site, base_seed: int):
    env = Environment(model, base_seed, r)
    occupation = occupation_probabilities(env, params).probability(site)
    weight = math.exp(-params.beta * omega(env, site))
    return occupation, weight


def negative_correlation_probe(model: DisorderModel,
                               params: PolymerParams,
                               site: Site,
                               R: int,
                               base_seed: int = 0,
                               pool: Optional[ReplicaPool] = None) -> CorrelationCheck:
    """Covariance of mu(x_m = y) and exp(-beta omega_{m,y}) over replicas; FKG makes it nonpositive."""
    kernel = functools.partial(_correlation_terms, model=model, params=params, site=site, base_seed=base_seed)
    values = np.array(resolve_pool(pool).map(kernel, range(R)))
    a, b = values[:, 0], values[:, 1]
    products = (a - a.mean()) * (b - b.mean())
    return CorrelationCheck(name=f'negative correlation at {site}',
                            R=R,
                            covariance=float(products.mean()),
                            stderr=float(products.std(ddof=1) / math.sqrt(R)))
