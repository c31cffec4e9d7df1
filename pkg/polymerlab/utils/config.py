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
Experiment configuration schema.

The JSON form mirrors the dataclasses below field for field. ``parse_config`` is strict: unknown keys, wrong
types and out-of-range values are all collected and reported together in one ConfigValidationError.
"""

import dataclasses
import json
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Mapping, Optional

from omegaconf import OmegaConf

from polymerlab.disorder.models import DisorderModel
from polymerlab.polymer.transfer import PolymerParams
from polymerlab.utils.errors import ConfigValidationError, DomainError

__all__ = [
    'DisorderConfig', 'CapsConfig', 'InfluenceConfig', 'NearlyGammaConfig', 'ExperimentConfig', 'parse_config',
    'config_from_dict', 'serialize_config'
]

_U64_MAX = 2**64 - 1


@dataclass
class DisorderConfig:
    kind: str = 'gaussian'
    params: Dict[str, float] = field(default_factory=lambda: {'sigma': 1.0})


@dataclass
class CapsConfig:
    max_memory_mb: float = 4096.0
    max_enumeration: int = 10**6
    max_brute_force_paths: int = 10**7


@dataclass
class InfluenceConfig:
    # each site is [n, x_1, ..., x_d]
    sites: List[List[int]] = field(default_factory=list)
    endpoint: Optional[List[int]] = None
    resamples: int = 4


@dataclass
class NearlyGammaConfig:
    y_min: float = -10.0
    y_max: float = 10.0
    points: int = 401
    B: Optional[float] = None
    table_path: Optional[str] = None


@dataclass
class ExperimentConfig:
    d: int = 1
    beta: float = 0.5
    disorder: DisorderConfig = field(default_factory=DisorderConfig)
    N_grid: List[int] = field(default_factory=lambda: [16])
    replicas: int = 100
    base_seed: int = 0
    t_grid: List[float] = field(default_factory=lambda: [0.0, 0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 2.0, 2.5, 3.0])
    block_length: int = 4
    K13: float = 1.0
    caps: CapsConfig = field(default_factory=CapsConfig)
    rate_reference_N: Optional[int] = None
    influence: InfluenceConfig = field(default_factory=InfluenceConfig)
    nearly_gamma: NearlyGammaConfig = field(default_factory=NearlyGammaConfig)
    fd_step: float = 1e-5
    efficiency_m: Optional[int] = None

    def model(self) -> DisorderModel:
        return DisorderModel(self.disorder.kind, self.disorder.params)

    def params(self, N: int) -> PolymerParams:
        return PolymerParams(self.d, N, self.beta)

    def params_grid(self) -> List[PolymerParams]:
        return [self.params(N) for N in self.N_grid]

    @property
    def reference_N(self) -> int:
        return self.rate_reference_N if self.rate_reference_N is not None else max(self.N_grid)


REQUIRED_KEYS = ('d', 'beta', 'disorder', 'N_grid', 'replicas', 'base_seed')


class _Collector:
    """Walks a raw mapping against a dataclass schema, converting values and recording every problem."""

    def __init__(self):
        self.errors: List[str] = []

    def error(self, message: str):
        self.errors.append(message)

    def mapping(self, raw: Any, where: str) -> Optional[Mapping]:
        if not isinstance(raw, Mapping):
            self.error(f'{where}: expected an object, got {type(raw).__name__}')
            return None
        return raw

    def unknown_keys(self, raw: Mapping, schema, where: str):
        known = {f.name for f in dataclasses.fields(schema)}
        for key in raw:
            if key not in known:
                self.error(f'{where}: unknown key {key!r} (allowed: {sorted(known)})')

    def integer(self, raw: Any, where: str, lo: Optional[int] = None, hi: Optional[int] = None) -> Optional[int]:
        if isinstance(raw, bool) or not isinstance(raw, int):
            self.error(f'{where}: expected an integer, got {raw!r}')
            return None
        if (lo is not None and raw < lo) or (hi is not None and raw > hi):
            self.error(f'{where}: {raw} out of range [{lo}, {hi if hi is not None else "inf"}]')
            return None
        return raw

    def real(self, raw: Any, where: str, lo: Optional[float] = None, strict: bool = False) -> Optional[float]:
        if isinstance(raw, bool) or not isinstance(raw, (int, float)) or not math.isfinite(raw):
            self.error(f'{where}: expected a finite number, got {raw!r}')
            return None
        value = float(raw)
        if lo is not None and (value <= lo if strict else value < lo):
            self.error(f'{where}: {value} must be {">" if strict else ">="} {lo}')
            return None
        return value

    def sorted_list(self, raw: Any, where: str, item: Callable[[Any, str], Any]) -> Optional[list]:
        if not isinstance(raw, (list, tuple)) or len(raw) == 0:
            self.error(f'{where}: expected a nonempty list, got {raw!r}')
            return None
        values = [item(v, f'{where}[{i}]') for i, v in enumerate(raw)]
        if any(v is None for v in values):
            return None
        if any(a >= b for a, b in zip(values, values[1:])):
            self.error(f'{where}: must be strictly increasing, got {values}')
            return None
        return values


def _section(c: _Collector, raw: Mapping, key: str, schema, build: Callable[[Mapping, str], Dict[str, Any]]):
    if key not in raw:
        return schema()
    section = c.mapping(raw[key], key)
    if section is None:
        return schema()
    c.unknown_keys(section, schema, key)
    values = {k: v for k, v in build(section, key).items() if v is not None}
    return schema(**values)


def _optional(section: Mapping, key: str, convert: Callable[[Any, str], Any], where: str):
    raw = section.get(key)
    return None if raw is None else convert(raw, f'{where}.{key}')


def config_from_dict(raw: Any) -> ExperimentConfig:
    """Validate a decoded config object and build the ExperimentConfig."""
    c = _Collector()
    raw = c.mapping(raw, 'config')
    if raw is None:
        raise ConfigValidationError(c.errors)
    c.unknown_keys(raw, ExperimentConfig, 'config')
    for key in REQUIRED_KEYS:
        if key not in raw:
            c.error(f'config: missing required key {key!r}')

    values: Dict[str, Any] = {}
    if 'd' in raw:
        values['d'] = c.integer(raw['d'], 'd', 1, 2)
    if 'beta' in raw:
        values['beta'] = c.real(raw['beta'], 'beta', lo=0.0)
    if 'N_grid' in raw:
        values['N_grid'] = c.sorted_list(raw['N_grid'], 'N_grid', lambda v, w: c.integer(v, w, lo=1))
    if 'replicas' in raw:
        values['replicas'] = c.integer(raw['replicas'], 'replicas', lo=2)
    if 'base_seed' in raw:
        values['base_seed'] = c.integer(raw['base_seed'], 'base_seed', 0, _U64_MAX)
    if 't_grid' in raw:
        values['t_grid'] = c.sorted_list(raw['t_grid'], 't_grid', lambda v, w: c.real(v, w, lo=0.0))
    if 'block_length' in raw:
        values['block_length'] = c.integer(raw['block_length'], 'block_length', lo=1)
    if 'K13' in raw:
        values['K13'] = c.real(raw['K13'], 'K13', lo=0.0, strict=True)
    if raw.get('rate_reference_N') is not None:
        values['rate_reference_N'] = c.integer(raw['rate_reference_N'], 'rate_reference_N', lo=1)
    if 'fd_step' in raw:
        values['fd_step'] = c.real(raw['fd_step'], 'fd_step', lo=0.0, strict=True)
    if raw.get('efficiency_m') is not None:
        values['efficiency_m'] = c.integer(raw['efficiency_m'], 'efficiency_m', lo=3)

    values['disorder'] = _section(c, raw, 'disorder', DisorderConfig, lambda s, w: _disorder(c, s, w))
    values['caps'] = _section(
        c, raw, 'caps', CapsConfig, lambda s, w: {
            'max_memory_mb': _optional(s, 'max_memory_mb', lambda v, x: c.real(v, x, lo=0.0, strict=True), w),
            'max_enumeration': _optional(s, 'max_enumeration', lambda v, x: c.integer(v, x, lo=1), w),
            'max_brute_force_paths': _optional(s, 'max_brute_force_paths', lambda v, x: c.integer(v, x, lo=1), w),
        })
    d = values.get('d') or 1
    values['influence'] = _section(c, raw, 'influence', InfluenceConfig, lambda s, w: _influence(c, s, w, d))
    values['nearly_gamma'] = _section(c, raw, 'nearly_gamma', NearlyGammaConfig, lambda s, w: _nearly_gamma(c, s, w))

    if c.errors:
        raise ConfigValidationError(c.errors)
    return ExperimentConfig(**{k: v for k, v in values.items() if v is not None})


def _disorder(c: _Collector, section: Mapping, where: str) -> Dict[str, Any]:
    kind = section.get('kind', 'gaussian')
    params = section.get('params', {})
    if c.mapping(params, f'{where}.params') is None:
        return {}
    try:
        model = DisorderModel(kind, dict(params))
    except (DomainError, TypeError, ValueError) as e:
        c.error(f'{where}: {e}')
        return {}
    return {'kind': model.kind.value, 'params': dict(model.params)}


def _int_vector(c: _Collector, raw: Any, where: str, length: int) -> Optional[List[int]]:
    if not isinstance(raw, (list, tuple)) or len(raw) != length:
        c.error(f'{where}: expected a list of {length} integers, got {raw!r}')
        return None
    values = [c.integer(v, f'{where}[{i}]') for i, v in enumerate(raw)]
    return None if any(v is None for v in values) else values


def _influence(c: _Collector, section: Mapping, where: str, d: int) -> Dict[str, Any]:
    out: Dict[str, Any] = {}
    sites = section.get('sites', [])
    if not isinstance(sites, (list, tuple)):
        c.error(f'{where}.sites: expected a list of [n, x_1, ..., x_d] entries')
    else:
        parsed = [_int_vector(c, s, f'{where}.sites[{i}]', d + 1) for i, s in enumerate(sites)]
        for i, s in enumerate(parsed):
            if s is not None and s[0] < 1:
                c.error(f'{where}.sites[{i}]: layer {s[0]} must be >= 1')
        out['sites'] = [s for s in parsed if s is not None]
    if section.get('endpoint') is not None:
        out['endpoint'] = _int_vector(c, section['endpoint'], f'{where}.endpoint', d)
    out['resamples'] = _optional(section, 'resamples', lambda v, x: c.integer(v, x, lo=1), where)
    return out


def _nearly_gamma(c: _Collector, section: Mapping, where: str) -> Dict[str, Any]:
    out = {
        'y_min': _optional(section, 'y_min', c.real, where),
        'y_max': _optional(section, 'y_max', c.real, where),
        'points': _optional(section, 'points', lambda v, x: c.integer(v, x, lo=2), where),
        'B': _optional(section, 'B', lambda v, x: c.real(v, x, lo=0.0), where),
    }
    table_path = section.get('table_path')
    if table_path is not None and not isinstance(table_path, str):
        c.error(f'{where}.table_path: expected a string, got {table_path!r}')
    else:
        out['table_path'] = table_path
    y_min = out['y_min'] if out['y_min'] is not None else NearlyGammaConfig.y_min
    y_max = out['y_max'] if out['y_max'] is not None else NearlyGammaConfig.y_max
    if not y_min < y_max:
        c.error(f'{where}: y_min={y_min} must be smaller than y_max={y_max}')
    return out


def parse_config(text: str) -> ExperimentConfig:
    """Parse JSON (or YAML) config text into a validated ExperimentConfig.

    Raises:
        ConfigValidationError: listing every problem found.
    """
    try:
        raw = json.loads(text)
    except json.JSONDecodeError:
        try:
            raw = OmegaConf.to_container(OmegaConf.create(text), resolve=True)
        except Exception as e:
            raise ConfigValidationError([f'config is neither valid JSON nor YAML: {e}']) from e
    return config_from_dict(raw)


def serialize_config(config: ExperimentConfig) -> str:
    """Canonical JSON (sorted keys); parse_config(serialize_config(c)) == c."""
    return json.dumps(dataclasses.asdict(config), sort_keys=True, indent=2)

