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
Empirical concentration profile of log Z_N on the sub-diffusive scale sqrt(N / log N).
"""

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy import stats as sp_stats

from polymerlab.disorder.models import DisorderModel
from polymerlab.estimators.replicas import run_replicas
from polymerlab.polymer.transfer import PolymerParams
from polymerlab.utils.errors import DomainError
from polymerlab.utils.logging_utils import get_logger
from polymerlab.workers.replica_pool import ReplicaPool

__all__ = ['TailProfile', 'tail_profile', 'concentration_profile', 'concentration_scale']

logger = get_logger(__file__)

MIN_EXCEEDANCE_COUNT = 10
MAX_EXCEEDANCE = 0.5


@dataclass
class TailProfile:
    """Exceedance P(|log Z_N - mean| > t * sqrt(N/log N)) on a t-grid, with a log-linear tail fit."""
    N: int
    R: int
    t_grid: List[float]
    exceedance: List[float]
    fitted_log_slope: float
    fit_intercept: float
    r_squared: float
    fit_window: Tuple[float, float]
    fit_points: int
    degenerate: bool = False
    notes: List[str] = field(default_factory=list)


def concentration_scale(N: int) -> float:
    if N < 2:
        raise DomainError(f'the scale sqrt(N/log N) needs N >= 2, got {N}')
    return math.sqrt(N / math.log(N))


def tail_profile(samples: Sequence[float], N: int, t_grid: Sequence[float]) -> TailProfile:
    """Tail computation on an existing replica sample of log Z_N.

    The log-linear fit uses only t values whose exceedance lies in [10/R, 0.5].
    """
    samples = np.asarray(samples, dtype=np.float64)
    R = len(samples)
    t_grid = [float(t) for t in t_grid]
    assert t_grid == sorted(t_grid), f't_grid must be sorted, got {t_grid}'
    window = (MIN_EXCEEDANCE_COUNT / R, MAX_EXCEEDANCE)
    deviation = np.abs(samples - samples.mean())
    if np.all(deviation == 0):
        logger.warning(f'log Z_{N} has zero variance over {R} replicas; tail slope undefined')
        return TailProfile(N, R, t_grid, [0.0] * len(t_grid), math.nan, math.nan, math.nan, window, 0, degenerate=True,
                           notes=['zero variance: exceedance identically zero, slope undefined'])
    scale = concentration_scale(N)
    exceedance = [float(np.mean(deviation > t * scale)) for t in t_grid]
    in_window = [(t, e) for t, e in zip(t_grid, exceedance) if window[0] <= e <= window[1]]
    notes = []
    if len(in_window) >= 2:
        ts, es = zip(*in_window)
        fit = sp_stats.linregress(ts, np.log(es))
        slope, intercept, r_squared = float(fit.slope), float(fit.intercept), float(fit.rvalue**2)
    else:
        slope = intercept = r_squared = math.nan
        notes.append(f'fewer than 2 exceedances inside the fit window [{window[0]:g}, {window[1]:g}]')
    return TailProfile(N, R, t_grid, exceedance, slope, intercept, r_squared, window, len(in_window), notes=notes)


def concentration_profile(model: DisorderModel,
                          params: PolymerParams,
                          R: int,
                          t_grid: Sequence[float],
                          base_seed: int = 0,
                          pool: Optional[ReplicaPool] = None,
                          max_memory_mb: Optional[float] = None) -> TailProfile:
    if R < 1000:
        logger.warning(f'R={R} replicas give coarse tails; 1000 or more are recommended')
    stats = run_replicas(model, [params], R, base_seed, pool=pool, max_memory_mb=max_memory_mb)
    return tail_profile(stats.samples(params.N), params.N, t_grid)
