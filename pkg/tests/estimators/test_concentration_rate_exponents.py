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

import math

import numpy as np
import pytest

from polymerlab.disorder import DisorderModel
from polymerlab.estimators import (concentration_profile, convergence_gap, estimate_free_energy, run_replicas,
                                   scaling_exponents, tail_profile)
from polymerlab.estimators.concentration import concentration_scale
from polymerlab.estimators.replicas import make_params_grid
from polymerlab.polymer import PolymerParams
from polymerlab.utils.errors import DomainError

GAUSSIAN = DisorderModel.gaussian(1.0)
T_GRID = [0.0, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0]


def test_zero_beta_profile_is_flagged():
    profile = concentration_profile(GAUSSIAN, PolymerParams(1, 16, 0.0), R=20, t_grid=T_GRID)
    assert profile.degenerate
    assert profile.exceedance == [0.0] * len(T_GRID)
    assert math.isnan(profile.fitted_log_slope)


def test_tail_profile_on_gaussian_samples():
    N = 100
    samples = np.random.default_rng(1).normal(scale=concentration_scale(N), size=5000)
    profile = tail_profile(samples, N, T_GRID)
    assert profile.exceedance[0] == pytest.approx(1.0)
    assert all(a >= b for a, b in zip(profile.exceedance, profile.exceedance[1:]))
    assert profile.fitted_log_slope < 0
    assert profile.fit_points >= 2
    assert 0.0 < profile.r_squared <= 1.0


def test_tail_profile_needs_points_in_window():
    profile = tail_profile([0.0, 1.0, 0.0, 1.0], 16, [10.0, 20.0])
    assert math.isnan(profile.fitted_log_slope)
    assert profile.notes


def test_concentration_scale():
    assert concentration_scale(100) == pytest.approx(math.sqrt(100 / math.log(100)))
    with pytest.raises(DomainError):
        concentration_scale(1)


@pytest.mark.slow
def test_concentration_desk_run():
    profile = concentration_profile(GAUSSIAN, PolymerParams(1, 256, 1.0), R=2000, t_grid=T_GRID, base_seed=0)
    assert all(a >= b for a, b in zip(profile.exceedance, profile.exceedance[1:]))
    assert profile.fitted_log_slope < 0


def test_zero_beta_gap():
    stats = run_replicas(GAUSSIAN, make_params_grid(1, 0.0, [2, 4, 8]), R=4, base_seed=0)
    report = convergence_gap(stats, estimate_free_energy(stats))
    assert [r.gap for r in report.rows] == [0.0, 0.0, 0.0]
    assert report.row(2).normalized_gap is None
    assert report.row(4).normalized_gap == 0.0
    assert report.gaps_nonnegative()


def test_gaps_nonnegative_small_run():
    stats = run_replicas(GAUSSIAN, make_params_grid(1, 0.5, [4, 8, 16, 64]), R=200, base_seed=3)
    estimate = estimate_free_energy(stats)
    report = convergence_gap(stats, estimate, N_values=[4, 8, 16])
    assert [r.N for r in report.rows] == [4, 8, 16]
    assert report.gaps_nonnegative()
    assert all(math.isfinite(r.normalized_gap) for r in report.rows)
    assert report.p_hat_stderr == estimate.stderr
    assert report.notes


@pytest.mark.slow
def test_gaps_desk_run():
    grid = [8, 16, 32, 64, 128, 256, 512, 1024]
    stats = run_replicas(GAUSSIAN, make_params_grid(1, 0.5, grid), R=400, base_seed=0)
    report = convergence_gap(stats, estimate_free_energy(stats), N_values=grid[:-1])
    assert report.gaps_nonnegative()


def test_exponents_simple_walk():
    grid = [4, 8, 16, 32, 64]
    stats = run_replicas(GAUSSIAN, make_params_grid(1, 0.0, grid), R=3, base_seed=0)
    report = scaling_exponents(stats)
    assert report.xi_hat == pytest.approx(0.5, abs=0.02)
    assert not report.chi_defined and math.isnan(report.chi_hat)
    exact = scaling_exponents(stats, msd_per_N=[float(N) for N in grid])
    assert exact.xi_hat == pytest.approx(0.5, abs=1e-10)


def test_exponents_disordered():
    grid = [4, 8, 16, 32]
    stats = run_replicas(GAUSSIAN, make_params_grid(1, 1.0, grid), R=100, base_seed=0)
    report = scaling_exponents(stats)
    assert report.chi_defined
    assert report.hyperscaling_residual == pytest.approx(report.chi_hat - (2 * report.xi_hat - 1))
    assert len(report.chi_residuals) == len(grid)


def test_exponents_need_four_points():
    stats = run_replicas(GAUSSIAN, make_params_grid(1, 0.5, [4, 8, 16]), R=3, base_seed=0)
    with pytest.raises(DomainError):
        scaling_exponents(stats)


@pytest.mark.slow
def test_normalized_gap_growth_desk_run():
    grid = [8, 16, 32, 64, 128, 256, 512, 1024]
    stats = run_replicas(GAUSSIAN, make_params_grid(1, 0.5, grid), R=2000, base_seed=1)
    reference = stats.summary(1024)
    report = convergence_gap(stats, reference.mean / 1024, N_values=grid[:-1])
    assert report.gaps_nonnegative()
    assert report.normalized_growth() <= 2.0
