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

from polymerlab.disorder import DisorderModel, Environment, Site
from polymerlab.polymer import PolymerParams, log_partition_p2p
from polymerlab.skeletons import (ScaleFns, block_factorization_residual, coarse_grained_skeletons, count_skeletons,
                                  decomposition_check, enumerate_skeletons, is_coarse_grained, scale_functions,
                                  simple_skeleton)
from polymerlab.skeletons.skeleton import block_increments
from polymerlab.utils.errors import DomainError, ResourceCapExceeded


def _random_path(N, seed):
    steps = np.random.default_rng(seed).choice([-1, 1], size=N)
    positions = np.concatenate([[0], np.cumsum(steps)])
    return [Site(n, (int(x),)) for n, x in enumerate(positions)]


def test_scale_function_values():
    rho, theta, phi = scale_functions(math.exp(4.0))
    assert theta == pytest.approx(32.0, rel=1e-12)
    assert rho == pytest.approx(0.6931472, abs=1e-7)
    assert ScaleFns().phi(math.exp(2.0)) == 8
    assert ScaleFns(K13=2.0).rho(math.exp(4.0)) == pytest.approx(0.6931472 / 2, abs=1e-7)
    with pytest.raises(DomainError):
        scale_functions(2)


def test_scale_function_ratio_decreases():
    scale = ScaleFns()
    ratios = [scale.theta(m) / (scale.phi(m) * scale.rho(m)) for m in (10**3, 10**4, 10**5, 10**6)]
    assert all(a > b for a, b in zip(ratios, ratios[1:]))


def test_efficiency_threshold_below_adequacy():
    scale = ScaleFns()
    for n in [8, 16, 64, 256, 1024, 10**5]:
        assert scale.efficiency_threshold(n) < scale.adequacy_threshold(n)


def test_simple_skeleton():
    path = _random_path(8, seed=3)
    skel = simple_skeleton(path, 2)
    assert skel.k == 4
    assert list(skel.waypoints) == path[::2]
    assert list(simple_skeleton(path, 8).waypoints) == [path[0], path[8]]
    assert list(simple_skeleton(path, 1).waypoints) == path
    with pytest.raises(DomainError):
        simple_skeleton(path, 3)


def test_enumeration():
    skels = enumerate_skeletons(1, 2, 2, 0)
    assert len(skels) == 3 <= (2 * 2)**(1 * 2)
    assert sorted(s.waypoints[1].x[0] for s in skels) == [-2, 0, 2]
    assert all(s.is_feasible() and s.endpoint == Site(4, (0,)) for s in skels)
    assert len(enumerate_skeletons(1, 3, 1, Site(3, (1,)))) == 1
    assert enumerate_skeletons(1, 2, 2, 1) == []
    with pytest.raises(DomainError):
        enumerate_skeletons(1, 2, 2, Site(5, (1,)))


@pytest.mark.parametrize('d', [1, 2])
def test_counts_bounded(d):
    for n in (1, 2, 3):
        assert len(block_increments(d, n)) <= (2 * n)**d
        for k in (1, 2, 3):
            endpoint = (0,) * d if (k * n) % 2 == 0 else (1,) + (0,) * (d - 1)
            count = count_skeletons(d, n, k, endpoint)
            assert count == len(enumerate_skeletons(d, n, k, endpoint))
            assert 1 <= count <= (2 * n)**(d * k)


def test_enumeration_cap():
    with pytest.raises(ResourceCapExceeded):
        enumerate_skeletons(1, 2, 20, 0, max_count=1000)


@pytest.mark.parametrize('d,N,n', [(1, 8, 2), (1, 12, 4), (2, 4, 2)])
def test_decomposition_identity(d, N, n):
    for r in range(5):
        env = Environment(DisorderModel.gaussian(1.0), 17, r)
        params = PolymerParams(d, N, 0.8)
        assert decomposition_check(env, params, n) <= 1e-10
        for skel in enumerate_skeletons(d, n, N // n, (0,) * d):
            assert block_factorization_residual(env, params, skel) <= 1e-10


def test_decomposition_degenerate_cases():
    env = Environment(DisorderModel.centered_exponential(1.0), 0)
    assert decomposition_check(env, PolymerParams(1, 8, 1.0), 8, endpoint=2) <= 1e-12
    free = PolymerParams(1, 8, 0.0)
    assert decomposition_check(env, free, 2) <= 1e-12
    assert log_partition_p2p(env, free, 0) == pytest.approx(math.log(math.comb(8, 4) / 2**8), abs=1e-12)
    with pytest.raises(DomainError):
        decomposition_check(env, free, 3)


def test_coarse_graining():
    skels = enumerate_skeletons(1, 2, 2, 0)
    assert len(coarse_grained_skeletons(skels, 2)) == 3
    coarse = coarse_grained_skeletons(skels, 4)
    assert len(coarse) == 1 and is_coarse_grained(coarse[0], 4)
