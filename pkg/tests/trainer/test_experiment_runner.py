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

import pandas as pd
import pytest

from polymerlab.trainer import experiment_runner
from polymerlab.trainer.experiment_runner import (EXIT_NUMERIC, EXIT_OK, EXIT_RESOURCE_CAP, EXIT_VALIDATION,
                                                  SUBCOMMANDS, execute, run)
from polymerlab.utils.config import config_from_dict
from polymerlab.utils.errors import NumericFailure


def _config(**overrides):
    raw = {
        'd': 1,
        'beta': 0.5,
        'disorder': {'kind': 'gaussian', 'params': {'sigma': 1.0}},
        'N_grid': [2, 4, 8, 16],
        'replicas': 5,
        'base_seed': 11,
        'block_length': 4,
    }
    raw.update(overrides)
    return raw


def _last_error(capsys) -> dict:
    lines = [line for line in capsys.readouterr().err.splitlines() if line.strip()]
    return json.loads(lines[-1])


def test_logz_end_to_end(tmp_path):
    out = str(tmp_path / 'logz')
    assert run('logz', _config(N_grid=[2, 4, 8]), out) == EXIT_OK
    with open(out + '.csv') as f:
        assert f.readline().startswith('# polymerlab-schema')
    df = pd.read_csv(out + '.csv', comment='#')
    assert list(df.columns) == ['experiment', 'd', 'beta', 'disorder', 'N', 'metric', 'value', 'stderr', 'units']
    values = df.pivot(index='N', columns='metric', values='value')
    assert list(values.index) == [2, 4, 8]
    assert (values['brute_force_abs_error'] < 1e-9).all()
    assert values['gradient_fd'].to_numpy() == pytest.approx(values['beta_occupation'].to_numpy(), abs=1e-7)
    assert values['occupation_total'].to_numpy() == pytest.approx([2.0, 4.0, 8.0], rel=1e-12)

    summary = json.load(open(out + '.json'))
    assert summary['experiment'] == 'logz' and summary['config']['base_seed'] == 11
    assert summary['values']['8']['log_Z'] == pytest.approx(values.loc[8, 'log_Z'], rel=1e-12)


def test_repeat_runs_are_byte_identical(tmp_path):
    first, second = str(tmp_path / 'a'), str(tmp_path / 'b')
    assert run('replicas', _config(N_grid=[4, 8]), first) == EXIT_OK
    assert run('replicas', json.dumps(_config(N_grid=[4, 8])), second) == EXIT_OK
    for suffix in ('.csv', '.json'):
        assert open(first + suffix, 'rb').read() == open(second + suffix, 'rb').read()


def test_memory_cap_refusal(tmp_path, capsys):
    out = str(tmp_path / 'capped')
    code = run('replicas', _config(caps={'max_memory_mb': 1e-9}), out)
    assert code == EXIT_RESOURCE_CAP
    error = _last_error(capsys)
    assert error['error'] == 'ResourceCapExceeded'
    assert error['details']['cap'] == 1e-9 and error['details']['estimate'] > 1e-9
    assert list(tmp_path.iterdir()) == []


def test_invalid_config(tmp_path, capsys):
    code = run('logz', _config(d=3, replicas=1), str(tmp_path / 'bad'))
    assert code == EXIT_VALIDATION
    error = _last_error(capsys)
    assert error['error'] == 'ConfigValidationError'
    assert len(error['details']['errors']) == 2
    assert list(tmp_path.iterdir()) == []


def test_unknown_subcommand(tmp_path, capsys):
    assert run('partition', _config(), str(tmp_path / 'x')) == EXIT_VALIDATION
    assert 'unknown subcommand' in _last_error(capsys)['message']


def test_numeric_failure_exit_code(tmp_path, capsys, monkeypatch):

    def broken(cfg, pool):
        raise NumericFailure('quantile bracket not found', {'u': 0.5, 'iterations': 200})

    monkeypatch.setitem(experiment_runner.SUBCOMMANDS, 'logz', broken)
    assert run('logz', _config(), str(tmp_path / 'x')) == EXIT_NUMERIC
    error = _last_error(capsys)
    assert error == {
        'error': 'NumericFailure',
        'message': 'quantile bracket not found',
        'details': {'u': 0.5, 'iterations': 200}
    }


def test_concentration_output(tmp_path):
    out = str(tmp_path / 'conc')
    assert run('concentration', _config(N_grid=[1, 4, 8], replicas=20, t_grid=[0.0, 0.5, 1.0]), out) == EXIT_OK
    df = pd.read_csv(out + '.csv', comment='#')
    assert set(df['metric']) == {'exceedance'}
    assert sorted(set(df['N'])) == [4, 8]
    assert sorted(set(df['t'])) == [0.0, 0.5, 1.0]
    assert ((df['value'] >= 0) & (df['value'] <= 1)).all()
    summary = json.load(open(out + '.json'))
    assert set(summary['profiles']) == {'4', '8'}
    assert 'fitted_log_slope' in summary['profiles']['8']


def test_concentration_needs_long_polymers(tmp_path, capsys):
    assert run('concentration', _config(N_grid=[1]), str(tmp_path / 'x')) == EXIT_VALIDATION
    assert _last_error(capsys)['error'] == 'DomainError'


def test_ng_cert_gaussian(tmp_path):
    out = str(tmp_path / 'ng')
    cfg = _config(nearly_gamma={'y_min': -5.0, 'y_max': 5.0, 'points': 101})
    assert run('ng-cert', cfg, out) == EXIT_OK
    summary = json.load(open(out + '.json'))
    assert summary['report']['A_fit'] == pytest.approx(0.0, abs=1e-6)
    assert summary['exp_moment_certificate_4beta'] is True
    assert len(summary['report']['grid']) == 101


def test_skeleton_decomposition(tmp_path):
    out = str(tmp_path / 'skel')
    assert run('skeleton', _config(replicas=8), out) == EXIT_OK
    summary = json.load(open(out + '.json'))
    assert abs(summary['decomposition_residual']) <= 1e-10
    assert set(summary['scale_functions']) == {'rho', 'theta', 'phi'}
    df = pd.read_csv(out + '.csv', comment='#')
    assert set(df['metric']) == {'s_hat'}
    # endpoints of a 4-step walk: -4, -2, 0, 2, 4
    assert sorted(df['x1']) == [-4, -2, 0, 2, 4]


@pytest.mark.parametrize('subcommand', sorted(SUBCOMMANDS))
def test_every_subcommand_runs(subcommand):
    table, summary = execute(subcommand, config_from_dict(_config()))
    assert len(table) > 0
    assert summary['experiment'] == subcommand
    json.dumps(experiment_runner.to_jsonable(summary), allow_nan=False)


@pytest.mark.slow
@pytest.mark.parametrize('subcommand', sorted(SUBCOMMANDS))
def test_thread_count_never_changes_output_bytes(subcommand, tmp_path):
    cfg = _config(replicas=40, nearly_gamma={'y_min': -5.0, 'y_max': 5.0, 'points': 101})
    serial, parallel = str(tmp_path / 'serial'), str(tmp_path / 'parallel')
    assert run(subcommand, cfg, serial, threads=1) == EXIT_OK
    assert run(subcommand, cfg, parallel, threads=8) == EXIT_OK
    for suffix in ('.csv', '.json'):
        assert open(serial + suffix, 'rb').read() == open(parallel + suffix, 'rb').read()
