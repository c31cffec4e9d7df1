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
Contain small numpy utilities for extended-real (log-space) arithmetic
"""

from typing import Sequence

import numpy as np
from scipy import special


def log_add_exp_reduce(terms: Sequence[np.ndarray]) -> np.ndarray:
    """Elementwise log(sum(exp(t))) over a list of equally shaped arrays.

    The reduction order is fixed (balanced pairwise tree in list order), so the result is
    bitwise reproducible regardless of how callers split the work.

    Args:
        terms: list of arrays holding log-weights; -inf encodes an empty contribution.

    Returns:
        array of the same shape as every element of ``terms``.
    """
    assert len(terms) > 0, 'need at least one term'
    level = list(terms)
    with np.errstate(invalid='ignore'):
        while len(level) > 1:
            paired = [np.logaddexp(level[i], level[i + 1]) for i in range(0, len(level) - 1, 2)]
            if len(level) % 2 == 1:
                paired.append(level[-1])
            level = paired
    return level[0]


def logsumexp(values, axis=None):
    """scipy logsumexp that maps an all -inf input to -inf silently."""
    values = np.asarray(values, dtype=np.float64)
    if values.size == 0:
        return -np.inf
    with np.errstate(divide='ignore', invalid='ignore'):
        return special.logsumexp(values, axis=axis)
