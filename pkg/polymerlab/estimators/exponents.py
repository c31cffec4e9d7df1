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
Fluctuation and wandering exponents from log-log slopes over the N-grid.
"""

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np
from scipy import stats as sp_stats

from polymerlab.estimators.replicas import ReplicaStats
from polymerlab.utils.errors import DomainError
from polymerlab.utils.logging_utils import get_logger

__all__ = ['ExponentReport', 'scaling_exponents', 'loglog_half_slope']

logger = get_logger(__file__)

MIN_POINTS = 4


@dataclass
class ExponentReport:
    N_grid: List[int]
    chi_hat: float
    xi_hat: float
    chi_residuals: List[float]
    xi_residuals: List[float]
    # chi - (2 xi - 1); diagnostic only, the scaling relation is conjectural
    hyperscaling_residual: float
    chi_defined: bool = True
    notes: List[str] = field(default_factory=list)


def loglog_half_slope(N_grid: Sequence[int], values: Sequence[float]):
    """Half the least-squares slope of log(values) against log(N), with the fit residuals."""
    x = np.log(np.asarray(N_grid, dtype=np.float64))
    y = np.log(np.asarray(values, dtype=np.float64))
    fit = sp_stats.linregress(x, y)
    residuals = y - (fit.intercept + fit.slope * x)
    return float(fit.slope) / 2.0, residuals.tolist()


def scaling_exponents(stats: ReplicaStats, msd_per_N: Optional[Sequence[float]] = None) -> ExponentReport:
    """chi_hat from Var(log Z_N) ~ N^{2 chi}, xi_hat from E_mu|x_N|^2 ~ N^{2 xi}.

    Args:
        stats: replica statistics on at least 4 grid points.
        msd_per_N: replica-averaged mean square displacements; defaults to the ones recorded in stats.
    """
    N_grid = list(stats.N_grid)
    if len(N_grid) < MIN_POINTS:
        raise DomainError(f'exponent fits need at least {MIN_POINTS} grid points, got {len(N_grid)}')
    msd = [s.msd_mean for s in stats.summaries] if msd_per_N is None else list(msd_per_N)
    assert len(msd) == len(N_grid), f'{len(msd)} msd values for {len(N_grid)} grid points'
    if min(msd) <= 0:
        raise DomainError('mean square displacements must be positive')
    xi_hat, xi_residuals = loglog_half_slope(N_grid, msd)

    notes = []
    variances = [s.variance for s in stats.summaries]
    if min(variances) <= 0:
        logger.warning('zero variance of log Z on the grid; chi is undefined')
        notes.append('zero variance of log Z_N: chi undefined')
        return ExponentReport(N_grid, math.nan, xi_hat, [], xi_residuals, math.nan, chi_defined=False, notes=notes)
    chi_hat, chi_residuals = loglog_half_slope(N_grid, variances)
    return ExponentReport(N_grid, chi_hat, xi_hat, chi_residuals, xi_residuals, chi_hat - (2 * xi_hat - 1), notes=notes)
