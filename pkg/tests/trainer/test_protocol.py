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

import json
import math
import os

import numpy as np
import pytest

from polymerlab.protocol import SCHEMA_LINE, ResultTable, format_number, to_jsonable, write_results
from polymerlab.utils.fs import atomic_write


def test_format_number():
    assert format_number(0.1) == '0.1'
    assert format_number(1 / 3) == '0.3333333333333333'
    assert float(format_number(1 / 3)) == 1 / 3
    assert format_number(np.float64(2.5)) == '2.5'
    assert format_number(np.int64(7)) == '7'
    assert format_number(True) == 'true'
    assert format_number(np.bool_(False)) == 'false'
    assert format_number(None) == ''
    assert format_number(-math.inf) == '-inf'
    assert format_number([1, -2]) == '[1, -2]'
    assert format_number('PASS') == 'PASS'


def test_to_jsonable():
    data = to_jsonable({'a': np.array([1.0, math.nan]), 2: (np.int32(3), math.inf), 'ok': np.bool_(True)})
    assert data == {'a': [1.0, 'nan'], '2': [3, 'inf'], 'ok': True}
    json.dumps(data, allow_nan=False)


def test_csv_layout():
    table = ResultTable()
    table.add('replicas', {'N': 4, 'R': 10}, 'mean_log_Z', 0.25, 0.01)
    table.add('replicas', {'N': 8, 't': 0.5}, 'exceedance', 0.125, units='probability')
    lines = table.to_csv().splitlines()
    assert lines[0] == SCHEMA_LINE
    assert lines[1] == 'experiment,N,R,t,metric,value,stderr,units'
    assert lines[2] == 'replicas,4,10,,mean_log_Z,0.25,0.01,'
    assert lines[3] == 'replicas,8,,0.5,exceedance,0.125,,probability'
    assert len(table) == 2


def test_write_results(tmp_path):
    out = str(tmp_path / 'nested' / 'run')
    table = ResultTable()
    table.add('logz', {'N': 2}, 'log_Z', 0.5)
    write_results(table, {'p_hat': math.nan}, out)
    assert open(out + '.csv').read().startswith(SCHEMA_LINE + '\n')
    assert json.load(open(out + '.json')) == {'p_hat': 'nan'}
    assert sorted(os.listdir(tmp_path / 'nested')) == ['run.csv', 'run.json']


def test_failed_write_leaves_nothing(tmp_path):
    out = str(tmp_path / 'run')
    with pytest.raises(TypeError):
        write_results(ResultTable(), {'bad': object()}, out)
    assert os.listdir(tmp_path) == []


def test_atomic_write(tmp_path):
    path = tmp_path / 'a.txt'
    atomic_write(str(path), 'first')
    atomic_write(str(path), b'second')
    assert path.read_text() == 'second'
    assert os.listdir(tmp_path) == ['a.txt']
