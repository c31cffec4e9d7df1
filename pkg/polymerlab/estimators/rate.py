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
Convergence-rate gaps N p_hat - E log Z_N.
"""

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Union

import pandas as pd

from polymerlab.estimators.replicas import FreeEnergyEstimate, ReplicaStats

__all__ = ['RateRow', 'RateReport', 'convergence_gap']

BIAS_NOTE = ('p_hat is lower-biased, so gaps are biased down; only the one-sided check gap >= -k*stderr '
             'is meaningful')


@dataclass
class RateRow:
    N: int
    gap: float
    gap_stderr: float
    # gap / (sqrt(N/log N) * log log N), defined for N >= 3
    normalized_gap: Optional[float]
    # gap / (sqrt(N) * log N), the weaker diffusive-scale normalization
    weak_normalized_gap: Optional[float]


@dataclass
class RateReport:
    p_hat: float
    p_hat_stderr: float
    rows: List[RateRow]
    notes: List[str] = field(default_factory=lambda: [BIAS_NOTE])

    def row(self, N: int) -> RateRow:
        return next(r for r in self.rows if r.N == N)

    def gaps_nonnegative(self, k: float = 3.0) -> bool:
        return all(r.gap >= -k * r.gap_stderr for r in self.rows)

    def normalized_growth(self) -> float:
        """normalized_gap at the largest N over its value at the smallest N >= 3."""
        values = [r.normalized_gap for r in self.rows if r.normalized_gap is not None]
        if len(values) < 2 or values[0] == 0:
            return math.nan
        return values[-1] / values[0]

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([vars(r) for r in self.rows])


def _normalizations(N: int):
    normalized = None
    if N >= 3:
        normalized = math.sqrt(N / math.log(N)) * math.log(math.log(N))
    weak = math.sqrt(N) * math.log(N) if N >= 2 else None
    return normalized, weak


def convergence_gap(stats: ReplicaStats,
                    p_hat: Union[float, FreeEnergyEstimate],
                    N_values: Optional[Sequence[int]] = None) -> RateReport:
    """gap(N) = N p_hat - mean(log Z_N) per N, with the combined standard error of both estimates.

    Args:
        p_hat: a plain value or the FreeEnergyEstimate it came from (whose stderr then enters gap_stderr).
        N_values: grid points to report; defaults to every N of stats.
    """
    p_stderr = p_hat.stderr if isinstance(p_hat, FreeEnergyEstimate) else 0.0
    p_value = float(p_hat)
    rows = []
    for N in (N_values if N_values is not None else stats.N_grid):
        s = stats.summary(N)
        gap = N * p_value - s.mean
        gap_stderr = math.sqrt(s.stderr**2 + (N * p_stderr)**2)
        normalized, weak = _normalizations(N)
        rows.append(
            RateRow(N=N,
                    gap=gap,
                    gap_stderr=gap_stderr,
                    normalized_gap=gap / normalized if normalized else None,
                    weak_normalized_gap=gap / weak if weak else None))
    return RateReport(p_hat=p_value, p_hat_stderr=p_stderr, rows=rows)
