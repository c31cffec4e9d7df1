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

import numpy as np
import pytest

from polymerlab.disorder import DisorderModel, Environment, log_mgf
from polymerlab.estimators import (annealed_check, doubling_check, doubling_means_check, estimate_free_energy,
                                   jensen_sandwich, run_replicas, variance_scale_table)
from polymerlab.estimators.replicas import estimate_memory_mb, make_params_grid
from polymerlab.polymer import PolymerParams, log_partition, mean_square_displacement
from polymerlab.utils.errors import DomainError, ResourceCapExceeded
from polymerlab.workers import ReplicaPool

GAUSSIAN = DisorderModel.gaussian(1.0)


def test_zero_beta_is_degenerate():
    stats = run_replicas(GAUSSIAN, make_params_grid(1, 0.0, [2, 4, 8]), R=5, base_seed=0)
    assert np.all(stats.log_z == 0.0)
    for s in stats.summaries:
        assert s.mean == 0.0 and s.variance == 0.0
        assert s.msd_mean == pytest.approx(s.N, rel=1e-12)
    estimate = estimate_free_energy(stats)
    assert estimate.p_hat == 0.0 and float(estimate) == 0.0


def test_replica_r_uses_replica_index_r():
    params_grid = make_params_grid(1, 0.8, [3, 7])
    stats = run_replicas(GAUSSIAN, params_grid, R=4, base_seed=11)
    assert stats.N_grid == [3, 7]
    for r in range(4):
        env = Environment(GAUSSIAN, 11, r)
        for i, params in enumerate(params_grid):
            assert stats.log_z[r, i] == pytest.approx(log_partition(env, params), abs=1e-12)
            assert stats.msd[r, i] == pytest.approx(mean_square_displacement(env, params), rel=1e-10)


def test_deterministic():
    grid = make_params_grid(2, 0.5, [4, 6])
    a = run_replicas(GAUSSIAN, grid, R=6, base_seed=3)
    b = run_replicas(GAUSSIAN, grid, R=6, base_seed=3)
    assert np.array_equal(a.log_z, b.log_z) and np.array_equal(a.msd, b.msd)
    c = run_replicas(GAUSSIAN, grid, R=6, base_seed=4)
    assert not np.array_equal(a.log_z, c.log_z)


@pytest.mark.slow
def test_worker_count_never_changes_results():
    grid = make_params_grid(1, 0.5, [8, 16])
    serial = run_replicas(GAUSSIAN, grid, R=40, base_seed=5)
    parallel = run_replicas(GAUSSIAN, grid, R=40, base_seed=5, pool=ReplicaPool(threads=2))
    assert np.array_equal(serial.log_z, parallel.log_z)


def test_refusals():
    with pytest.raises(DomainError):
        run_replicas(GAUSSIAN, make_params_grid(1, 0.5, [4]), R=1, base_seed=0)
    with pytest.raises(ResourceCapExceeded) as info:
        run_replicas(GAUSSIAN, make_params_grid(1, 0.5, [4]), R=10**9, base_seed=0, max_memory_mb=100.0)
    assert info.value.estimate == pytest.approx(estimate_memory_mb(1, 4, 10**9, 1))


def test_jensen_sandwich_small_run():
    stats = run_replicas(GAUSSIAN, make_params_grid(1, 0.5, [4, 8, 16]), R=500, base_seed=1)
    table = jensen_sandwich(stats)
    assert table['lower_ok'].all() and table['upper_ok'].all()
    assert table['lambda_beta'].iloc[0] == pytest.approx(0.125)
    estimate = estimate_free_energy(stats)
    assert estimate.p_hat <= log_mgf(GAUSSIAN, 0.5) + 3 * estimate.stderr
    assert estimate.argmax_N in stats.N_grid


@pytest.mark.slow
def test_jensen_sandwich_desk_run():
    stats = run_replicas(GAUSSIAN, [PolymerParams(1, 16, 0.5)], R=10**4, base_seed=1)
    s = stats.summary(16)
    assert -3 * s.stderr / 16 <= s.mean / 16 <= 0.125 + 3 * s.stderr / 16


def test_annealed_mean():
    stats = run_replicas(GAUSSIAN, make_params_grid(1, 0.3, [4]), R=2000, base_seed=2)
    assert annealed_check(stats, 4)['ok']


def test_doubling():
    stats = run_replicas(GAUSSIAN, make_params_grid(1, 0.7, [4, 8, 16]), R=300, base_seed=8)
    table = doubling_means_check(stats)
    assert list(table['N']) == [4, 8]
    assert table['ok'].all()
    check = doubling_check(GAUSSIAN, PolymerParams(1, 6, 0.7), R=50, base_seed=8, x=2)
    assert check.min_residual >= -1e-10
    assert check.holds()


def test_variance_scale_table():
    stats = run_replicas(GAUSSIAN, make_params_grid(1, 0.5, [1, 4, 16]), R=50, base_seed=0)
    table = variance_scale_table(stats)
    assert np.isnan(table['scaled_variance'].iloc[0])
    assert table['scaled_variance'].iloc[2] == pytest.approx(stats.summary(16).variance * np.log(16) / 16)


def test_frame():
    stats = run_replicas(GAUSSIAN, make_params_grid(1, 0.5, [2, 4]), R=10, base_seed=0)
    frame = stats.to_frame()
    assert list(frame['N']) == [2, 4]
    assert {'mean', 'variance', 'stderr', 'msd', 'q50'} <= set(frame.columns)
    with pytest.raises(DomainError):
        stats.summary(3)


@pytest.mark.slow
def test_annealed_identity_desk_run():
    stats = run_replicas(GAUSSIAN, [PolymerParams(1, 16, 0.5)], R=10**5, base_seed=0)
    result = annealed_check(stats, 16)
    assert result['annealed'] == pytest.approx(np.exp(16 * 0.125), rel=1e-12)
    assert result['ok']


DESK_GRID = [8, 16, 32, 64, 128, 256, 512]


@pytest.mark.slow
def test_jensen_and_doubling_desk_run():
    stats = run_replicas(GAUSSIAN, make_params_grid(1, 0.5, DESK_GRID), R=2000, base_seed=0)
    table = jensen_sandwich(stats)
    assert table['lower_ok'].all() and table['upper_ok'].all()
    doubling = doubling_means_check(stats)
    assert list(doubling['N']) == DESK_GRID[:-1]
    assert doubling['ok'].all()


@pytest.mark.slow
def test_variance_scale_desk_run():
    stats = run_replicas(GAUSSIAN, make_params_grid(1, 1.0, [32, 512]), R=2000, base_seed=0)
    table = variance_scale_table(stats).set_index('N')
    assert table.loc[512, 'scaled_variance'] <= 2 * table.loc[32, 'scaled_variance']
