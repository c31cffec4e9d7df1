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
Numerical certificate that a density is nearly gamma.

psi(y) = phi(Phi^{-1}(H(y))) / h(y) is the derivative of the monotone map T = H^{-1} o Phi sending a standard
Gaussian to the law. The law is nearly gamma when psi(y)^2 <= B + A|y| on the support and the
endpoint/tail conditions hold. A grid can only certify up to its resolution; the endpoint power-law
and tail Mills-ratio checks are sufficient conditions for the behaviour beyond the grid.
"""

import math
from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import special

from polymerlab.nearly_gamma.density import DensitySpec, bracketed_quantile
from polymerlab.utils.errors import DomainError, NumericFailure
from polymerlab.utils.logging_utils import get_logger

__all__ = [
    'Side', 'ConditionVerdict', 'NearlyGammaReport', 'psi', 'psi_with_flag', 'fit_envelope', 'check_condition_iv',
    'check_condition_v', 'gaussian_transport', 'exp_moment_certificate', 'certify', 'default_B', 'default_grid'
]

logger = get_logger(__file__)

_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)
# below this tail mass the plain CDF loses relative accuracy and the log-space path is used
_TAIL_LOG_MASS = math.log(1e-15)
BAND_FACTOR = 10.0
IV_STEPS = 8
V_STEPS = 10
NOT_NECESSARY_NOTE = ('tail ratio condition (v) is sufficient, not necessary: the envelope psi^2 <= B + A|y| '
                      'can hold although the ratio drifts')


class Side(str, Enum):
    LOWER = 'lower'
    UPPER = 'upper'


@dataclass
class ConditionVerdict:
    condition: str
    side: Side
    passed: bool
    points: List[float]
    ratios: List[float]
    alpha: Optional[float] = None
    endpoint: Optional[float] = None
    note: str = ''

    @property
    def verdict(self) -> str:
        return 'PASS' if self.passed else 'FAIL'

    @property
    def ratio_range(self) -> Tuple[float, float]:
        return min(self.ratios), max(self.ratios)

    def to_dict(self) -> Dict[str, Any]:
        out = asdict(self)
        out['side'] = self.side.value
        out['verdict'] = self.verdict
        return out


@dataclass
class NearlyGammaReport:
    density: str
    grid: List[float]
    psi_values: List[float]
    B: float
    A_fit: float
    witness_y: Optional[float]
    tail_flags: List[bool] = field(default_factory=list)
    cond_iv: List[ConditionVerdict] = field(default_factory=list)
    cond_v: List[ConditionVerdict] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)

    @property
    def moment_threshold(self) -> float:
        """Exponential moments E[exp(t|omega|)] are certified finite for t below this value."""
        return math.inf if self.A_fit == 0 else 2.0 / self.A_fit

    @property
    def envelope_ok(self) -> bool:
        """The envelope fit produced a finite slope from finite psi values."""
        return (len(self.psi_values) > 0 and all(math.isfinite(v) for v in self.psi_values)
                and math.isfinite(self.A_fit) and math.isfinite(self.B))

    @property
    def certified(self) -> bool:
        """Envelope fit usable and every finite endpoint passes condition (iv)."""
        return self.envelope_ok and all(v.passed for v in self.cond_iv)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'density': self.density,
            'grid': list(self.grid),
            'psi_values': list(self.psi_values),
            'tail_flags': list(self.tail_flags),
            'B': self.B,
            'A_fit': self.A_fit,
            'witness_y': self.witness_y,
            'moment_threshold': self.moment_threshold,
            'envelope_ok': self.envelope_ok,
            'certified': self.certified,
            'cond_iv': [v.to_dict() for v in self.cond_iv],
            'cond_v': [v.to_dict() for v in self.cond_v],
            'notes': list(self.notes),
        }


def psi_with_flag(spec: DensitySpec, y: float) -> Tuple[float, bool]:
    """psi(y) and whether the tail-asymptotic (log-space) path was needed."""
    y = float(y)
    if not spec.in_interior(y):
        raise DomainError(f'psi is defined on the interior of the support {spec.support}, got y={y}')
    log_h = float(spec.log_h(y))
    if not math.isfinite(log_h):
        raise DomainError(f'density of {spec.name} vanishes at y={y}')
    log_lower = float(spec.log_H(y))
    log_upper = float(spec.log_survival(y))
    # quantile from the smaller tail, so neither side suffers cancellation
    if log_lower <= log_upper:
        q = float(special.ndtri_exp(log_lower))
        tail = log_lower < _TAIL_LOG_MASS
    else:
        q = -float(special.ndtri_exp(log_upper))
        tail = log_upper < _TAIL_LOG_MASS
    if not math.isfinite(q):
        raise NumericFailure('normal quantile is not finite', {'y': y, 'log_H': log_lower, 'log_sf': log_upper})
    return math.exp(-0.5 * q * q - _LOG_SQRT_2PI - log_h), tail


def psi(spec: DensitySpec, y: float) -> float:
    return psi_with_flag(spec, y)[0]


def fit_envelope(spec: DensitySpec, grid: Sequence[float], B: float) -> NearlyGammaReport:
    """Smallest A such that psi(y)^2 <= B + A|y| on the grid.

    Args:
        spec: density to certify.
        grid: evaluation points inside the support.
        B: intercept of the envelope, chosen by the caller.

    Returns:
        NearlyGammaReport with ``A_fit`` and the witness y attaining it; the condition verdicts are left empty.
    """
    if not (math.isfinite(B) and B >= 0):
        raise DomainError(f'B must be a nonnegative real, got {B}')
    grid = [float(y) for y in grid]
    assert len(grid) > 0, 'the envelope grid is empty'
    values, flags = [], []
    for y in grid:
        value, tail = psi_with_flag(spec, y)
        values.append(value)
        flags.append(tail)
    if any(flags):
        logger.warning(f'{sum(flags)} psi evaluations for {spec.name} used the tail-asymptotic path')

    A_fit, witness = 0.0, None
    for y, value in zip(grid, values):
        if y == 0:
            continue
        slope = max(value * value - B, 0.0) / abs(y)
        if slope > A_fit:
            A_fit, witness = slope, y
    return NearlyGammaReport(density=spec.name,
                             grid=grid,
                             psi_values=values,
                             B=float(B),
                             A_fit=A_fit,
                             witness_y=witness,
                             tail_flags=flags)


def _band_ok(ratios: np.ndarray) -> bool:
    return bool(np.all(np.isfinite(ratios)) and np.all(ratios > 0) and ratios.max() <= BAND_FACTOR * ratios.min())


def check_condition_iv(spec: DensitySpec, endpoint: float, side: Union[Side, str]) -> ConditionVerdict:
    """Power-law behaviour h(x) ~ |x - endpoint|^alpha with alpha > -1 at a finite support endpoint.

    The density is sampled at distances scale * 10^-k, k = 1..8, from the endpoint (inside the support).
    """
    side = Side(side)
    endpoint = float(endpoint)
    if not math.isfinite(endpoint):
        raise DomainError(f'condition (iv) applies to finite endpoints, got {endpoint}')
    direction = 1.0 if side is Side.LOWER else -1.0
    deltas = spec.scale * 10.0**-np.arange(1, IV_STEPS + 1)
    points = endpoint + direction * deltas
    if not all(spec.in_interior(x) for x in points):
        raise DomainError(f'points approaching {endpoint} from the {side.value} side leave the support {spec.support}')
    with np.errstate(divide='ignore'):
        log_h = np.array([float(spec.log_h(x)) for x in points])
    if not np.all(np.isfinite(log_h)):
        return ConditionVerdict('iv', side, False, points.tolist(), np.exp(log_h).tolist(), endpoint=endpoint,
                                note='density vanishes identically near the endpoint')
    alpha = float(np.polyfit(np.log(deltas), log_h, 1)[0])
    ratios = np.exp(log_h - alpha * np.log(deltas))
    passed = alpha > -1.0 and _band_ok(ratios)
    return ConditionVerdict('iv', side, passed, points.tolist(), ratios.tolist(), alpha=alpha, endpoint=endpoint)


def check_condition_v(spec: DensitySpec, side: Union[Side, str]) -> ConditionVerdict:
    """Mills ratio (1 - H(x))/h(x) (or H(x)/h(x) on the lower tail) bounded away from 0 and infinity.

    Evaluated at x = +/- scale * 2^k, k = 0..9.
    """
    side = Side(side)
    bound = spec.upper if side is Side.UPPER else spec.lower
    if math.isfinite(bound):
        raise DomainError(f'condition (v) applies to infinite tails; the {side.value} end of {spec.name} is {bound}')
    direction = 1.0 if side is Side.UPPER else -1.0
    points = direction * spec.scale * 2.0**np.arange(V_STEPS)
    log_ratios = []
    for x in points:
        log_mass = spec.log_survival(x) if side is Side.UPPER else spec.log_H(x)
        log_ratios.append(float(log_mass) - float(spec.log_h(x)))
    ratios = np.exp(np.array(log_ratios))
    return ConditionVerdict('v', side, _band_ok(ratios), points.tolist(), ratios.tolist())


def _transport_scalar(spec: DensitySpec, xi: float) -> float:
    if not math.isfinite(xi):
        raise DomainError(f'transport is defined for finite xi, got {xi}')
    try:
        if xi <= 0:
            x = spec.H_inv(float(special.ndtr(xi)))
        else:
            x = spec.H_inv_upper(float(special.ndtr(-xi)))
    except NumericFailure as e:
        e.diagnostics.setdefault('xi', xi)
        raise
    if not math.isfinite(x):
        # closed forms can saturate in the far tail; fall back to root finding on log H
        target = float(special.log_ndtr(xi))
        x = bracketed_quantile(lambda v: float(spec.log_H(v)), target, spec.support, spec.scale)
    return x


def gaussian_transport(spec: DensitySpec, xi):
    """T(xi) = H^{-1}(Phi(xi)), the monotone map pushing N(0,1) forward to the law; vectorized over xi."""
    if np.ndim(xi) == 0:
        return _transport_scalar(spec, float(xi))
    xi = np.asarray(xi, dtype=np.float64)
    if not np.all(np.isfinite(xi)):
        raise DomainError('transport is defined for finite xi')
    out = np.empty_like(xi)
    low = xi <= 0
    if spec.ppf is not None and spec.isf is not None:
        out[low] = spec.ppf(special.ndtr(xi[low]))
        out[~low] = spec.isf(special.ndtr(-xi[~low]))
        bad = ~np.isfinite(out)
    else:
        bad = np.ones_like(low)
    for i in np.flatnonzero(bad):
        out.flat[i] = _transport_scalar(spec, float(xi.flat[i]))
    return out


def exp_moment_certificate(report: NearlyGammaReport, t: float) -> bool:
    """True iff t < 2/A_fit, the range on which exponential moments of order t are certified finite."""
    return report.A_fit == 0 or t < report.moment_threshold


def default_B(spec: DensitySpec, points: int = 201) -> float:
    """1.05 * max psi^2 over |y| <= 1 (clipped to the support interior)."""
    lo, hi = max(spec.lower, -1.0), min(spec.upper, 1.0)
    inner = np.linspace(lo, hi, points + 2)[1:-1]
    return 1.05 * max(psi(spec, y)**2 for y in inner)


def default_grid(spec: DensitySpec, y_min: float, y_max: float, points: int) -> np.ndarray:
    lo, hi = max(spec.lower, y_min), min(spec.upper, y_max)
    grid = np.linspace(lo, hi, points)
    # open support ends are excluded from the grid
    return grid[[spec.in_interior(y) for y in grid]]


def certify(spec: DensitySpec,
            grid: Optional[Sequence[float]] = None,
            B: Optional[float] = None,
            y_min: float = -10.0,
            y_max: float = 10.0,
            points: int = 401) -> NearlyGammaReport:
    """Envelope fit plus endpoint and tail conditions on every finite endpoint / infinite tail."""
    if grid is None:
        grid = default_grid(spec, y_min, y_max, points)
    if B is None:
        B = default_B(spec)
    report = fit_envelope(spec, grid, B)
    if math.isfinite(spec.lower):
        report.cond_iv.append(check_condition_iv(spec, spec.lower, Side.LOWER))
    else:
        report.cond_v.append(check_condition_v(spec, Side.LOWER))
    if math.isfinite(spec.upper):
        report.cond_iv.append(check_condition_iv(spec, spec.upper, Side.UPPER))
    else:
        report.cond_v.append(check_condition_v(spec, Side.UPPER))
    if any(not v.passed for v in report.cond_v):
        report.notes.append(NOT_NECESSARY_NOTE)
    logger.info(f'nearly-gamma certificate for {spec.name}: A_fit={report.A_fit:.6g} B={report.B:.6g}')
    return report
