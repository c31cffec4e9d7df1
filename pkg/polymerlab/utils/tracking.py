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
Metric tracking for experiment runs: timings and scalar summaries go to the console and, optionally, to wandb.
Nothing logged here ends up in the result files.
"""
import dataclasses
import numbers
from enum import Enum
from typing import Any, Dict, List, Mapping, Optional, Union

import pandas as pd


def format_metrics(data: Mapping[str, Any], step: int) -> str:
    """``step:<k> - name:value - ...`` with numeric values only, 6 significant digits."""
    parts = [f'step:{step}']
    parts.extend(f'{k}:{v:.6g}' for k, v in data.items() if isinstance(v, numbers.Number))
    return ' - '.join(parts)


class _ConsoleBackend:

    def log(self, data, step):
        print(format_metrics(data, step=step), flush=True)

    def finish(self):
        pass


class _WandbBackend:

    def __init__(self, project_name: str, experiment_name: str, config: Optional[Dict]):
        import wandb
        wandb.init(project=project_name, name=experiment_name, config=flatten_config(config))
        self._run = wandb

    def log(self, data, step):
        self._run.log(data=dict(data), step=step)

    def finish(self):
        self._run.finish(exit_code=0)


class Tracking:
    """Fan metric dicts out to the selected backends.

    Args:
        default_backend: one name or a list out of ``supported_backend``.
        config: the raw experiment config, recorded flattened (``caps/max_memory_mb``) by backends that store it.
    """
    supported_backend = ['wandb', 'console']

    def __init__(self, project_name, experiment_name, default_backend: Union[str, List[str]] = 'console', config=None):
        if isinstance(default_backend, str):
            default_backend = [default_backend]
        for backend in default_backend:
            assert backend in self.supported_backend, f'{backend} is not supported'

        self.logger = {}
        if 'wandb' in default_backend:
            self.logger['wandb'] = _WandbBackend(project_name, experiment_name, config)
        if 'console' in default_backend:
            self.logger['console'] = _ConsoleBackend()

    def log(self, data, step, backend=None):
        for name, logger_instance in self.logger.items():
            if backend is None or name in backend:
                logger_instance.log(data=data, step=step)

    def finish(self):
        for logger_instance in self.logger.values():
            logger_instance.finish()
        self.logger = {}


def _to_serializable(x) -> Any:
    if dataclasses.is_dataclass(x):
        return _to_serializable(dataclasses.asdict(x))
    if isinstance(x, dict):
        return {k: _to_serializable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_to_serializable(v) for v in x]
    if isinstance(x, Enum):
        return x.value
    return x


def flatten_config(config) -> Dict[str, Any]:
    """Nested config as one level of ``a/b`` keys; lists stay values."""
    if config is None:
        return {}
    return pd.json_normalize(_to_serializable(config), sep='/').to_dict(orient='records')[0]
