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
Monte Carlo harness over independent disorder replicas.

Replica r uses ``Environment(model, base_seed, replica_index=r)``. One forward recursion per replica
to max(N_grid) yields log Z_N and E_mu|x_N|^2 for every N on the grid, and the (R, len(N_grid))
sample matrices are assembled in replica order.
"""

import functools
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from polymerlab.disorder.environment import Environment, Site
from polymerlab.disorder.models import DisorderModel, check_moment_hypothesis, log_mgf
from polymerlab.polymer.transfer import (PolymerParams, iter_forward_fields, log_partition, log_partition_p2p,
                                         log_partition_shifted)
from polymerlab.utils.errors import DomainError, ResourceCapExceeded
from polymerlab.utils.logging_utils import get_logger
from polymerlab.utils.numeric_functional import logsumexp
from polymerlab.workers.replica_pool import ReplicaPool, resolve_pool

__all__ = [
    'QUANTILE_LEVELS', 'ReplicaSummary', 'ReplicaStats', 'FreeEnergyEstimate', 'InequalityCheck', 'make_params_grid',
    'estimate_memory_mb', 'run_replicas', 'estimate_free_energy', 'jensen_sandwich', 'annealed_check',
    'variance_scale_table', 'doubling_check', 'doubling_means_check'
]

logger = get_logger(__file__)

QUANTILE_LEVELS = (0.01, 0.05, 0.25, 0.5, 0.75, 0.95, 0.99)
FREE_ENERGY_CAVEAT = ('p_hat = max_N mean(log Z_N)/N is a lower-biased plug-in: by superadditivity '
                      'E log Z_N / N <= p(beta) for every N')


@dataclass
class ReplicaSummary:
    N: int
    R: int
    mean: float
    variance: float
    stderr: float
    quantiles: Dict[float, float]
    msd_mean: float
    msd_stderr: float


@dataclass
class ReplicaStats:
    """Per-replica samples of log Z_N and E_mu|x_N|^2 over an N-grid, with summaries per N."""
    model: DisorderModel
    d: int
    beta: float
    N_grid: List[int]
    base_seed: int
    log_z: np.ndarray
    msd: np.ndarray
    summaries: List[ReplicaSummary] = field(init=False)

    def __post_init__(self):
        assert self.log_z.shape == (self.R, len(self.N_grid)), \
            f'log_z has shape {self.log_z.shape}, expected ({self.R}, {len(self.N_grid)})'
        self.summaries = [self._summarize(i) for i in range(len(self.N_grid))]

    @property
    def R(self) -> int:
        return self.log_z.shape[0]

    def _summarize(self, i: int) -> ReplicaSummary:
        samples = self.log_z[:, i]
        variance = float(np.var(samples, ddof=1))
        msd = self.msd[:, i]
        return ReplicaSummary(N=self.N_grid[i],
                              R=self.R,
                              mean=float(np.mean(samples)),
                              variance=variance,
                              stderr=math.sqrt(variance / self.R),
                              quantiles=dict(zip(QUANTILE_LEVELS, np.quantile(samples, QUANTILE_LEVELS).tolist())),
                              msd_mean=float(np.mean(msd)),
                              msd_stderr=float(np.std(msd, ddof=1) / math.sqrt(self.R)))

    def index(self, N: int) -> int:
        try:
            return self.N_grid.index(N)
        except ValueError:
            raise DomainError(f'N={N} is not on the grid {self.N_grid}') from None

    def summary(self, N: int) -> ReplicaSummary:
        return self.summaries[self.index(N)]

    def samples(self, N: int) -> np.ndarray:
        return self.log_z[:, self.index(N)]

    def to_frame(self) -> pd.DataFrame:
        rows = []
        for s in self.summaries:
            row = {'N': s.N, 'R': s.R, 'mean': s.mean, 'variance': s.variance, 'stderr': s.stderr,
                   'mean_per_N': s.mean / s.N, 'msd': s.msd_mean, 'msd_stderr': s.msd_stderr}
            row.update({f'q{round(100 * q):02d}': v for q, v in s.quantiles.items()})
            rows.append(row)
        return pd.DataFrame(rows)


@dataclass
class FreeEnergyEstimate:
    p_hat: float
    argmax_N: int
    stderr: float
    caveat: str = FREE_ENERGY_CAVEAT

    def __float__(self):
        return self.p_hat


@dataclass
class InequalityCheck:
    """Averaged form of an exact per-replica inequality lhs >= rhs."""
    name: str
    R: int
    lhs_mean: float
    rhs_mean: float
    diff_mean: float
    diff_stderr: float
    min_residual: float

    def holds(self, k: float = 3.0, tol: float = 1e-10) -> bool:
        return self.min_residual >= -tol and self.diff_mean >= -k * self.diff_stderr

    @classmethod
    def from_samples(cls, name: str, lhs: np.ndarray, rhs: np.ndarray) -> 'InequalityCheck':
        diff = lhs - rhs
        return cls(name=name,
                   R=len(diff),
                   lhs_mean=float(lhs.mean()),
                   rhs_mean=float(rhs.mean()),
                   diff_mean=float(diff.mean()),
                   diff_stderr=float(diff.std(ddof=1) / math.sqrt(len(diff))),
                   min_residual=float(diff.min()))


def make_params_grid(d: int, beta: float, N_grid: Sequence[int]) -> List[PolymerParams]:
    return [PolymerParams(d, N, beta) for N in N_grid]


def estimate_memory_mb(d: int, N_max: int, R: int, grid_size: int) -> float:
    """Upper estimate of the resident memory of a replica run (sample matrices + live DP layers)."""
    layer_bytes = 8 * (2 * N_max + 5)**d
    dp_bytes = (2 * d + 4) * layer_bytes
    sample_bytes = 2 * 8 * R * grid_size
    return (dp_bytes + sample_bytes) / 2**20


def _squared_norms(k: int, d: int) -> np.ndarray:
    axis = np.arange(-k, k + 1, dtype=np.float64)**2
    out = np.zeros((2 * k + 1,) * d)
    for i in range(d):
        shape = [1] * d
        shape[i] = 2 * k + 1
        out = out + axis.reshape(shape)
    return out


def replica_observables(r: int, model: DisorderModel, d: int, beta: float, N_grid: Tuple[int, ...],
                        base_seed: int) -> Tuple[np.ndarray, np.ndarray]:
    """(log Z_N, E_mu|x_N|^2) for every N of the grid, for replica r."""
    env = Environment(model, base_seed, r)
    targets = {N: i for i, N in enumerate(N_grid)}
    log_z = np.zeros(len(N_grid))
    msd = np.zeros(len(N_grid))
    for k, values, _ in iter_forward_fields(env, d, beta, max(N_grid)):
        if k not in targets:
            continue
        total = float(logsumexp(values))
        with np.errstate(invalid='ignore'):
            weights = np.exp(values - total)
        msd[targets[k]] = float(np.sum(weights * _squared_norms(k, d)))
        log_z[targets[k]] = 0.0 if beta == 0.0 else total
    return log_z, msd


def run_replicas(model: DisorderModel,
                 params_grid: Sequence[PolymerParams],
                 R: int,
                 base_seed: int,
                 pool: Optional[ReplicaPool] = None,
                 max_memory_mb: Optional[float] = None) -> ReplicaStats:
    """Sample log Z_N over R independent environments for every N of ``params_grid``.

    Args:
        params_grid: polymer parameters sharing d and beta; their N values form the grid.
        R: number of replicas (>= 2).
        max_memory_mb: refuse the run (ResourceCapExceeded) when the memory estimate exceeds it.
    """
    if R < 2:
        raise DomainError(f'need at least 2 replicas for variances, got R={R}')
    params_grid = list(params_grid)
    assert params_grid, 'empty parameter grid'
    d, beta = params_grid[0].d, params_grid[0].beta
    assert all(p.d == d and p.beta == beta for p in params_grid), 'params_grid must share d and beta'
    N_grid = sorted({p.N for p in params_grid})
    if max_memory_mb is not None:
        estimate = estimate_memory_mb(d, max(N_grid), R, len(N_grid))
        if estimate > max_memory_mb:
            raise ResourceCapExceeded('replica run memory (MB)', estimate, max_memory_mb)
    check_moment_hypothesis(model, beta)
    logger.info(f'running {R} replicas of {model.name}, d={d}, beta={beta}, N_grid={N_grid}')

    kernel = functools.partial(replica_observables, model=model, d=d, beta=beta, N_grid=tuple(N_grid),
                               base_seed=base_seed)
    results = resolve_pool(pool).map(kernel, range(R))
    log_z = np.stack([res[0] for res in results])
    msd = np.stack([res[1] for res in results])
    return ReplicaStats(model=model, d=d, beta=beta, N_grid=N_grid, base_seed=base_seed, log_z=log_z, msd=msd)


def estimate_free_energy(stats: ReplicaStats) -> FreeEnergyEstimate:
    """p_hat = max over the N-grid of mean(log Z_N)/N."""
    assert stats.summaries, 'empty replica statistics'
    best = max(stats.summaries, key=lambda s: s.mean / s.N)
    return FreeEnergyEstimate(p_hat=best.mean / best.N, argmax_N=best.N, stderr=best.stderr / best.N)


def jensen_sandwich(stats: ReplicaStats, model: Optional[DisorderModel] = None, beta: Optional[float] = None,
                    k: float = 3.0) -> pd.DataFrame:
    """Per N: 0 <= mean(log Z_N)/N <= lambda(beta), each side with k standard errors of slack."""
    model = model or stats.model
    beta = stats.beta if beta is None else beta
    lam = log_mgf(model, beta)
    rows = []
    for s in stats.summaries:
        per_n = s.mean / s.N
        slack = k * s.stderr / s.N
        rows.append({'N': s.N, 'mean_per_N': per_n, 'lambda_beta': lam, 'slack': slack,
                     'lower_ok': per_n >= -slack, 'upper_ok': per_n <= lam + slack})
    return pd.DataFrame(rows)


def annealed_check(stats: ReplicaStats, N: int, k: float = 4.0) -> Dict[str, float]:
    """Compare the sample mean of Z_N with exp(N lambda(beta))."""
    z = np.exp(stats.samples(N))
    mean = float(z.mean())
    stderr = float(z.std(ddof=1) / math.sqrt(len(z)))
    target = math.exp(N * log_mgf(stats.model, stats.beta))
    return {'N': N, 'mean_Z': mean, 'stderr': stderr, 'annealed': target,
            'z_score': (mean - target) / stderr if stderr > 0 else 0.0,
            'ok': abs(mean - target) <= k * stderr + 1e-12 * target}


def variance_scale_table(stats: ReplicaStats) -> pd.DataFrame:
    """Var(log Z_N) * log N / N over the grid, the variance on the sub-diffusive concentration scale."""
    rows = []
    for s in stats.summaries:
        ratio = s.variance * math.log(s.N) / s.N if s.N >= 2 else math.nan
        rows.append({'N': s.N, 'variance': s.variance, 'scaled_variance': ratio})
    return pd.DataFrame(rows)


def doubling_check(model: DisorderModel,
                   params: PolymerParams,
                   R: int,
                   base_seed: int,
                   x: Union[int, Sequence[int], None] = None,
                   pool: Optional[ReplicaPool] = None) -> InequalityCheck:
    """log Z_{2N} >= log Z_N(x) + log Z^{(N,x)}_N replica by replica (restriction to paths through (N,x))."""
    x = tuple([0] * params.d) if x is None else x
    x = (x,) if isinstance(x, int) else tuple(x)
    kernel = functools.partial(_doubling_terms, model=model, params=params, base_seed=base_seed, x=x)
    results = np.array(resolve_pool(pool).map(kernel, range(R)))
    return InequalityCheck.from_samples(f'doubling N={params.N} x={x}', results[:, 0], results[:, 1])


def _doubling_terms(r: int, model: DisorderModel, params: PolymerParams, base_seed: int, x: Tuple[int, ...]):
    env = Environment(model, base_seed, r)
    doubled = PolymerParams(params.d, 2 * params.N, params.beta)
    rhs = log_partition_p2p(env, params, x) + log_partition_shifted(env, params, Site(params.N, x))
    return log_partition(env, doubled), rhs


def doubling_means_check(stats: ReplicaStats, k: float = 3.0) -> pd.DataFrame:
    """mean(log Z_N)/N non-decreasing along N -> 2N pairs of the grid, with k joint standard errors of slack."""
    rows = []
    for s in stats.summaries:
        if 2 * s.N not in stats.N_grid:
            continue
        t = stats.summary(2 * s.N)
        diff = stats.samples(2 * s.N) / (2 * s.N) - stats.samples(s.N) / s.N
        stderr = float(diff.std(ddof=1) / math.sqrt(stats.R))
        rows.append({'N': s.N, 'mean_per_N': s.mean / s.N, 'mean_per_2N': t.mean / t.N, 'diff': float(diff.mean()),
                     'joint_stderr': stderr, 'ok': float(diff.mean()) >= -k * stderr})
    return pd.DataFrame(rows)
