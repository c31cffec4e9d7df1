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
Density specifications (h, H, H^{-1}) consumed by the nearly-gamma certifier.
"""

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy import optimize

from polymerlab.disorder.models import DisorderModel
from polymerlab.utils.errors import DomainError, NumericFailure

__all__ = ['DensitySpec', 'density_from_model', 'density_from_table', 'load_density_table', 'bracketed_quantile']

_MAX_EXPANSIONS = 200
_QUANTILE_XTOL = 1e-12


def bracketed_quantile(cdf: Callable[[float], float],
                       u: float,
                       support: Tuple[float, float],
                       scale: float = 1.0,
                       xtol: float = _QUANTILE_XTOL) -> float:
    """Solve cdf(x) = u by expanding a bracket inside the support and running brentq on it."""
    lo, hi = support
    a, b = lo, hi
    if not math.isfinite(a):
        a = min(-scale, hi - scale)
        for _ in range(_MAX_EXPANSIONS):
            if cdf(a) < u:
                break
            a = 2.0 * a if a < 0 else a - scale
        else:
            raise NumericFailure('could not bracket the quantile from below', {'u': u, 'last_lower': a})
    if not math.isfinite(b):
        b = max(scale, lo + scale)
        for _ in range(_MAX_EXPANSIONS):
            if cdf(b) > u:
                break
            b = 2.0 * b if b > 0 else b + scale
        else:
            raise NumericFailure('could not bracket the quantile from above', {'u': u, 'last_upper': b})
    try:
        return float(optimize.brentq(lambda x: cdf(x) - u, a, b, xtol=xtol, maxiter=500))
    except (ValueError, RuntimeError) as e:
        raise NumericFailure('quantile root finding failed', {'u': u, 'bracket': [a, b], 'reason': str(e)}) from e


@dataclass(frozen=True)
class DensitySpec:
    """A one-dimensional law given by its density h and CDF H on a support interval.

    Only ``pdf`` and ``cdf`` are required; the log-space and upper-tail evaluators default to
    values derived from them and should be supplied whenever a more accurate form exists.
    """
    name: str
    support: Tuple[float, float]
    pdf: Callable
    cdf: Callable
    sf: Optional[Callable] = None
    logpdf: Optional[Callable] = None
    logcdf: Optional[Callable] = None
    logsf: Optional[Callable] = None
    ppf: Optional[Callable] = None
    isf: Optional[Callable] = None
    scale: float = 1.0

    def __post_init__(self):
        lo, hi = self.support
        if not lo < hi:
            raise DomainError(f'support must be a nonempty interval, got {self.support}')
        object.__setattr__(self, 'support', (float(lo), float(hi)))

    @property
    def lower(self) -> float:
        return self.support[0]

    @property
    def upper(self) -> float:
        return self.support[1]

    def in_interior(self, y: float) -> bool:
        return self.lower < y < self.upper

    def h(self, y):
        return self.pdf(y)

    def H(self, y):
        return self.cdf(y)

    def survival(self, y):
        return self.sf(y) if self.sf is not None else 1.0 - self.cdf(y)

    def log_h(self, y):
        if self.logpdf is not None:
            return self.logpdf(y)
        with np.errstate(divide='ignore'):
            return np.log(self.pdf(y))

    def log_H(self, y):
        if self.logcdf is not None:
            return self.logcdf(y)
        with np.errstate(divide='ignore'):
            return np.log(self.cdf(y))

    def log_survival(self, y):
        if self.logsf is not None:
            return self.logsf(y)
        with np.errstate(divide='ignore'):
            return np.log(self.survival(y))

    def H_inv(self, u: float) -> float:
        """Lower quantile H^{-1}(u)."""
        if self.ppf is not None:
            x = float(self.ppf(u))
            if math.isfinite(x):
                return x
        return bracketed_quantile(self.cdf, u, self.support, self.scale)

    def H_inv_upper(self, q: float) -> float:
        """The x with 1 - H(x) = q; accurate for small q."""
        if self.isf is not None:
            x = float(self.isf(q))
            if math.isfinite(x):
                return x
        return bracketed_quantile(lambda x: -self.survival(x), -q, self.support, self.scale)


def density_from_model(model: DisorderModel) -> DensitySpec:
    """Closed-form density spec of a disorder model (scipy frozen distribution)."""
    dist = model.frozen()
    return DensitySpec(name=model.name,
                       support=model.support(),
                       pdf=dist.pdf,
                       cdf=dist.cdf,
                       sf=dist.sf,
                       logpdf=dist.logpdf,
                       logcdf=dist.logcdf,
                       logsf=dist.logsf,
                       ppf=dist.ppf,
                       isf=dist.isf,
                       scale=model.std())


def density_from_table(y: Sequence[float], h: Sequence[float], H: Sequence[float], name: str = 'table') -> DensitySpec:
    """Piecewise-linear density spec from tabulated (y, h, H) columns.

    The support is [y[0], y[-1]]; quantiles are found by bracketing on the interpolated CDF.
    """
    y, h, H = (np.asarray(a, dtype=np.float64) for a in (y, h, H))
    problems = []
    if not (y.ndim == 1 and len(y) >= 2 and y.shape == h.shape == H.shape):
        problems.append('y, h and H must be 1-d columns of equal length >= 2')
    else:
        if not np.all(np.diff(y) > 0):
            problems.append('y must be strictly increasing')
        if not np.all(h >= 0):
            problems.append('h must be nonnegative')
        if not (np.all(np.diff(H) >= 0) and H[0] >= 0 and H[-1] <= 1):
            problems.append('H must be nondecreasing with values in [0, 1]')
    if problems:
        raise DomainError(f'invalid density table {name!r}: ' + '; '.join(problems))

    def pdf(x):
        return np.interp(x, y, h, left=0.0, right=0.0)

    def cdf(x):
        return np.interp(x, y, H, left=0.0, right=1.0)

    return DensitySpec(name=name, support=(float(y[0]), float(y[-1])), pdf=pdf, cdf=cdf, scale=float(y[-1] - y[0]) / 4)


def load_density_table(path: str) -> DensitySpec:
    """Read a CSV with columns ``y``, ``h``, ``H`` (lines starting with '#' are ignored)."""
    df = pd.read_csv(path, comment='#')
    missing = [c for c in ('y', 'h', 'H') if c not in df.columns]
    if missing:
        raise DomainError(f'density table {path} lacks columns {missing}')
    return density_from_table(df['y'].to_numpy(), df['h'].to_numpy(), df['H'].to_numpy(), name=str(path))
