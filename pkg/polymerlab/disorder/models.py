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
Disorder laws for the polymer environment.

Every model is centered analytically (mean exactly zero), has a density, and exposes a closed-form
log-moment generating function together with a vectorized quantile map used by the samplers.
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Mapping, Tuple

import numpy as np
from scipy import special, stats

from polymerlab.utils.errors import DomainError
from polymerlab.utils.logging_utils import get_logger

__all__ = ['DisorderKind', 'DisorderModel', 'log_mgf', 'check_moment_hypothesis']

logger = get_logger(__file__)


class DisorderKind(str, Enum):
    GAUSSIAN = 'gaussian'
    CENTERED_EXPONENTIAL = 'centered_exponential'
    CENTERED_GAMMA = 'centered_gamma'
    CENTERED_UNIFORM = 'centered_uniform'


_PARAM_NAMES: Dict[DisorderKind, Tuple[str, ...]] = {
    DisorderKind.GAUSSIAN: ('sigma',),
    DisorderKind.CENTERED_EXPONENTIAL: ('rate',),
    DisorderKind.CENTERED_GAMMA: ('shape', 'scale'),
    DisorderKind.CENTERED_UNIFORM: ('half_width',),
}


@dataclass(frozen=True)
class DisorderModel:
    """A mean-zero, absolutely continuous site law.

    Serialized as ``{"kind": <name>, "params": {<name>: <number>}}``.
    """
    kind: DisorderKind
    params: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        try:
            kind = DisorderKind(self.kind)
        except ValueError:
            raise DomainError(f'unknown disorder kind {self.kind!r}; '
                              f'expected one of {[k.value for k in DisorderKind]}') from None
        object.__setattr__(self, 'kind', kind)
        expected = _PARAM_NAMES[kind]
        missing = [name for name in expected if name not in self.params]
        unknown = [name for name in self.params if name not in expected]
        if missing or unknown:
            raise DomainError(f'{kind.value} takes parameters {list(expected)}; '
                              f'missing {missing}, unknown {unknown}')
        params = {name: float(self.params[name]) for name in expected}
        for name, value in params.items():
            if not (math.isfinite(value) and value > 0):
                raise DomainError(f'{kind.value} parameter {name} must be a positive real, got {value}')
        object.__setattr__(self, 'params', params)

    @classmethod
    def gaussian(cls, sigma: float = 1.0) -> 'DisorderModel':
        return cls(DisorderKind.GAUSSIAN, {'sigma': sigma})

    @classmethod
    def centered_exponential(cls, rate: float = 1.0) -> 'DisorderModel':
        return cls(DisorderKind.CENTERED_EXPONENTIAL, {'rate': rate})

    @classmethod
    def centered_gamma(cls, shape: float, scale: float = 1.0) -> 'DisorderModel':
        return cls(DisorderKind.CENTERED_GAMMA, {'shape': shape, 'scale': scale})

    @classmethod
    def centered_uniform(cls, half_width: float = 1.0) -> 'DisorderModel':
        return cls(DisorderKind.CENTERED_UNIFORM, {'half_width': half_width})

    @classmethod
    def from_dict(cls, data: Mapping) -> 'DisorderModel':
        return cls(data['kind'], dict(data.get('params', {})))

    def to_dict(self) -> Dict:
        return {'kind': self.kind.value, 'params': dict(self.params)}

    def __hash__(self):
        return hash((self.kind, tuple(sorted(self.params.items()))))

    @property
    def name(self) -> str:
        args = ','.join(f'{v:g}' for v in self.params.values())
        return f'{self.kind.value}({args})'

    def support(self) -> Tuple[float, float]:
        p = self.params
        if self.kind is DisorderKind.GAUSSIAN:
            return -math.inf, math.inf
        if self.kind is DisorderKind.CENTERED_EXPONENTIAL:
            return -1.0 / p['rate'], math.inf
        if self.kind is DisorderKind.CENTERED_GAMMA:
            return -p['shape'] * p['scale'], math.inf
        return -p['half_width'], p['half_width']

    def finiteness_interval(self) -> Tuple[float, float]:
        """Open interval of theta on which log_mgf is finite."""
        p = self.params
        if self.kind is DisorderKind.CENTERED_EXPONENTIAL:
            return -math.inf, p['rate']
        if self.kind is DisorderKind.CENTERED_GAMMA:
            return -math.inf, 1.0 / p['scale']
        return -math.inf, math.inf

    def variance(self) -> float:
        p = self.params
        if self.kind is DisorderKind.GAUSSIAN:
            return p['sigma']**2
        if self.kind is DisorderKind.CENTERED_EXPONENTIAL:
            return 1.0 / p['rate']**2
        if self.kind is DisorderKind.CENTERED_GAMMA:
            return p['shape'] * p['scale']**2
        return p['half_width']**2 / 3.0

    def std(self) -> float:
        return math.sqrt(self.variance())

    def frozen(self):
        """The centered law as a frozen scipy.stats distribution."""
        p = self.params
        if self.kind is DisorderKind.GAUSSIAN:
            return stats.norm(loc=0.0, scale=p['sigma'])
        if self.kind is DisorderKind.CENTERED_EXPONENTIAL:
            return stats.expon(loc=-1.0 / p['rate'], scale=1.0 / p['rate'])
        if self.kind is DisorderKind.CENTERED_GAMMA:
            return stats.gamma(a=p['shape'], loc=-p['shape'] * p['scale'], scale=p['scale'])
        return stats.uniform(loc=-p['half_width'], scale=2.0 * p['half_width'])

    def quantile(self, u: np.ndarray) -> np.ndarray:
        """Map uniforms in (0, 1) to draws from the law (inverse CDF)."""
        u = np.asarray(u, dtype=np.float64)
        p = self.params
        if self.kind is DisorderKind.GAUSSIAN:
            return p['sigma'] * special.ndtri(u)
        if self.kind is DisorderKind.CENTERED_EXPONENTIAL:
            return (-np.log1p(-u) - 1.0) / p['rate']
        if self.kind is DisorderKind.CENTERED_GAMMA:
            return (special.gammaincinv(p['shape'], u) - p['shape']) * p['scale']
        return p['half_width'] * (2.0 * u - 1.0)


def _log_sinhc(t: float) -> float:
    # log(sinh(t)/t)
    a = abs(t)
    if a < 1e-3:
        return a * a / 6.0 - a**4 / 180.0
    return a + math.log1p(-math.exp(-2.0 * a)) - math.log(2.0 * a)


def log_mgf(model: DisorderModel, theta: float) -> float:
    """lambda(theta) = log E[exp(theta * omega)] in closed form.

    Raises:
        DomainError: theta outside the open finiteness interval of the model.
    """
    theta = float(theta)
    lo, hi = model.finiteness_interval()
    if not (lo < theta < hi):
        raise DomainError(f'log_mgf of {model.name} is finite only for theta in ({lo}, {hi}); got {theta}')
    p = model.params
    if model.kind is DisorderKind.GAUSSIAN:
        return 0.5 * (p['sigma'] * theta)**2
    if model.kind is DisorderKind.CENTERED_EXPONENTIAL:
        r = theta / p['rate']
        return -r - math.log1p(-r)
    if model.kind is DisorderKind.CENTERED_GAMMA:
        st = p['scale'] * theta
        return -p['shape'] * (st + math.log1p(-st))
    return _log_sinhc(p['half_width'] * theta)


def check_moment_hypothesis(model: DisorderModel, beta: float) -> bool:
    """Whether the moment condition E[exp(4 beta |omega|)] < inf behind the concentration bound holds.

    A violation is logged, never raised: the simulation stays well defined for any beta.
    """
    lo, hi = model.finiteness_interval()
    holds = lo < -4.0 * beta and 4.0 * beta < hi
    if not holds:
        logger.warning(f'E[exp(4*beta*|omega|)] is infinite for {model.name} at beta={beta}; '
                       f'concentration statements assume 4*beta < {hi}')
    return holds
