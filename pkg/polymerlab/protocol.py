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
Tabular result protocol shared by every experiment: self-describing rows, CSV + JSON emission.

CSV files start with the schema line ``# polymerlab-schema v1``; floats are written in their shortest
round-trip form so identical runs produce identical bytes.
"""

import json
import math
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Optional

import numpy as np
import pandas as pd

from polymerlab.utils.fs import atomic_write_many

__all__ = ['SCHEMA_LINE', 'ResultRow', 'ResultTable', 'format_number', 'to_jsonable', 'write_results']

SCHEMA_LINE = '# polymerlab-schema v1'
_FIXED_COLUMNS = ('experiment', 'metric', 'value', 'stderr', 'units')


def format_number(value: Any) -> str:
    """Shortest round-trip text of a number; '' for missing values."""
    if value is None:
        return ''
    if isinstance(value, (bool, np.bool_)):
        return 'true' if value else 'false'
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (list, tuple)):
        return json.dumps([to_jsonable(v) for v in value])
    return str(value)


def to_jsonable(x: Any) -> Any:
    """Plain JSON values; non-finite floats become the strings 'nan', 'inf', '-inf'."""
    if isinstance(x, dict):
        return {str(k): to_jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [to_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return to_jsonable(x.tolist())
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else repr(x)
    return x


@dataclass
class ResultRow:
    """One measured quantity with the parameters needed to interpret it."""
    experiment: str
    params: Dict[str, Any]
    metric: str
    value: Any
    stderr: Optional[float] = None
    units: str = ''


@dataclass
class ResultTable:
    rows: List[ResultRow] = field(default_factory=list)

    def __len__(self):
        return len(self.rows)

    def add(self, experiment: str, params: Dict[str, Any], metric: str, value: Any, stderr: Optional[float] = None,
            units: str = ''):
        self.rows.append(ResultRow(experiment, dict(params), metric, value, stderr, units))

    def extend(self, rows: Iterable[ResultRow]):
        self.rows.extend(rows)

    def param_columns(self) -> List[str]:
        columns: List[str] = []
        for row in self.rows:
            for key in row.params:
                if key not in columns:
                    columns.append(key)
        return columns

    def to_frame(self) -> pd.DataFrame:
        """One column per parameter (in first-seen order) between ``experiment`` and ``metric``."""
        params = self.param_columns()
        records = []
        for row in self.rows:
            record = {'experiment': row.experiment}
            record.update({k: format_number(row.params.get(k)) for k in params})
            record.update({'metric': row.metric, 'value': format_number(row.value),
                           'stderr': format_number(row.stderr), 'units': row.units})
            records.append(record)
        return pd.DataFrame(records, columns=['experiment', *params, *_FIXED_COLUMNS[1:]])

    def to_csv(self) -> str:
        body = self.to_frame().to_csv(index=False, lineterminator='\n')
        return f'{SCHEMA_LINE}\n{body}'


def write_results(table: ResultTable, summary: Dict[str, Any], out: str):
    """Write ``<out>.csv`` and ``<out>.json`` atomically (both or neither appear)."""
    atomic_write_many({
        f'{out}.csv': table.to_csv(),
        f'{out}.json': json.dumps(to_jsonable(summary), sort_keys=True, indent=2) + '\n',
    })
