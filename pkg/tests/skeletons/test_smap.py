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

import pytest

from polymerlab.disorder import DisorderModel
from polymerlab.skeletons import ScaleFns, SMap, classify, origin_inefficiency_table, s_map, subadditivity_check
from polymerlab.skeletons.smap import SEntry
from polymerlab.utils.errors import DomainError

GAUSSIAN = DisorderModel.gaussian(1.0)


def _flat_map(n, values):
    return SMap(n=n, beta=0.5, p_hat=0.0, R=2, entries={x: SEntry(v, 0.0) for x, v in values.items()})


def test_free_walk_s_map():
    smap = s_map(GAUSSIAN, 4, 0.0, R=3, p_hat=0.0)
    expected = {(0,): 6 / 16, (2,): 4 / 16, (-2,): 4 / 16, (4,): 1 / 16, (-4,): 1 / 16}
    assert set(smap.entries) == set(expected)
    for x, p in expected.items():
        assert smap[x].s_hat == pytest.approx(-math.log(p), abs=1e-12)
        assert smap[x].stderr == pytest.approx(0.0, abs=1e-12)
    assert max(smap.entries, key=lambda x: smap[x].s_hat) in [(4,), (-4,)]
    assert smap.notes


def test_s_map_symmetry():
    smap = s_map(GAUSSIAN, 6, 0.5, R=200, p_hat=0.1, base_seed=4)
    for x in (2, 4, 6):
        a, b = smap[x], smap[-x]
        assert abs(a.s_hat - b.s_hat) <= 3 * math.hypot(a.stderr, b.stderr)
    frame = smap.to_frame()
    assert list(frame.columns) == ['n', 'x1', 's_hat', 'stderr']


def test_s_map_domain():
    with pytest.raises(DomainError):
        s_map(GAUSSIAN, 2, 0.5, R=10, p_hat=0.0)
    with pytest.raises(DomainError):
        s_map(GAUSSIAN, 4, 0.5, R=1, p_hat=0.0)


def test_two_dimensional_s_map():
    smap = s_map(GAUSSIAN, 3, 0.5, R=4, p_hat=0.0, d=2)
    assert (1, 2) in smap.entries and (0, 0) not in smap.entries
    assert len(smap.entries) == 16


def test_classify_all_zero():
    n = 16
    labels = classify(_flat_map(n, {(x,): 0.0 for x in range(-n, n + 1, 2)}), ScaleFns())
    assert len(labels.adequate) == len(labels.efficient) == n + 1
    assert labels.h_n == n


def test_classify_single_adequate_site_clamps():
    labels = classify(_flat_map(16, {(0,): 0.0, (2,): 1e9, (-2,): 1e9}), ScaleFns())
    assert labels.adequate == [(0,)]
    assert labels.h_n == 0
    assert labels.u_n == 2 and labels.u_clamped
    assert any('clamped' in note for note in labels.notes)


def test_classify_efficient_subset_of_adequate():
    scale = ScaleFns()
    n = 16
    values = {(x,): abs(x) * 3.0 for x in range(-n, n + 1, 2)}
    labels = classify(_flat_map(n, values), scale)
    assert set(labels.efficient) <= set(labels.adequate)
    assert labels.adequacy_threshold == pytest.approx(4 * scale.theta(16))
    assert labels.efficiency_threshold == pytest.approx(16 * scale.rho(16))


def test_classify_with_separate_efficiency_map():
    smap = _flat_map(8, {(0,): 0.0, (2,): 0.0})
    other = _flat_map(10, {(0,): 1e9, (4,): 0.0})
    labels = classify(smap, ScaleFns(), efficiency_map=other)
    assert labels.efficient == [(4,)]
    assert labels.adequate == [(0,), (2,)]


def test_subadditivity_shadow():
    check = subadditivity_check(GAUSSIAN, 4, 0.7, 2, R=100, base_seed=1)
    assert check.min_residual >= -1e-10
    assert check.holds()


def test_origin_inefficiency_table():
    table = origin_inefficiency_table(GAUSSIAN, [4, 8], 0.5, R=50, p_hat=0.1)
    assert list(table['n']) == [4, 8]
    assert table['ratio'].iloc[1] == pytest.approx(table['s_hat'].iloc[1] / (math.sqrt(8) * math.log(8)))
    with pytest.raises(DomainError):
        origin_inefficiency_table(GAUSSIAN, [3, 4], 0.5, R=10, p_hat=0.0)


def test_classify_intersects_efficient_with_adequate():
    # a small K13 lifts the efficiency threshold above the adequacy threshold at n = 16
    scale = ScaleFns(K13=0.01)
    assert scale.efficiency_threshold(16) > scale.adequacy_threshold(16)
    smap = _flat_map(16, {(0,): 0.0, (2,): 100.0, (-2,): 100.0})
    labels = classify(smap, scale)
    assert labels.adequate == [(0,)]
    assert labels.efficient == [(0,)]
    assert any('removed from the efficient set' in note for note in labels.notes)
    same_n = classify(smap, scale, efficiency_map=_flat_map(16, {(0,): 0.0, (4,): 0.0}))
    assert same_n.efficient == [(0,)]


def test_classify_notes_foreign_efficiency_map():
    smap = _flat_map(8, {(0,): 0.0})
    labels = classify(smap, ScaleFns(), efficiency_map=_flat_map(10, {(4,): 0.0}))
    assert labels.efficient == [(4,)]
    assert any('m=10' in note for note in labels.notes)


@pytest.mark.parametrize('K13', [1.0, 0.01])
def test_classify_s_map_efficient_subset_of_adequate(K13):
    smap = s_map(GAUSSIAN, 8, 0.5, R=20, p_hat=0.1, base_seed=2)
    labels = classify(smap, ScaleFns(K13=K13))
    assert set(labels.efficient) <= set(labels.adequate)


def test_origin_inefficiency_ratio_bounded():
    table = origin_inefficiency_table(GAUSSIAN, [4, 8, 16, 32], 0.5, R=100, p_hat=0.1, base_seed=5)
    assert table['ratio'].notna().all() and table['ratio_stderr'].notna().all()
    assert table['ratio'].abs().max() <= 1.0
    # the ratio does not grow along the grid
    assert table['ratio'].iloc[-1] <= table['ratio'].iloc[0] + 3 * table['ratio_stderr'].iloc[0]
