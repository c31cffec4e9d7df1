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
Replica-level fan-out. Each replica is a pure function of its index, and results are gathered in submission
order, so outputs never depend on the number of workers.
"""

from typing import Callable, List, Optional, Sequence, TypeVar

import ray

from polymerlab.utils.logging_utils import get_logger
from polymerlab.utils.py_functional import split_contiguous

__all__ = ['ReplicaPool']

logger = get_logger(__file__)

T = TypeVar('T')

# chunks per worker; more chunks smooth out uneven replica costs
_CHUNKS_PER_WORKER = 4


@ray.remote
def _run_chunk(fn: Callable[[int], T], indices: List[int]) -> List[T]:
    return [fn(r) for r in indices]


class ReplicaPool:
    """Map a replica function over replica indices, locally or on a local ray runtime.

    Args:
        threads: worker count; 1 runs in-process without touching ray.
    """

    def __init__(self, threads: int = 1, chunks_per_worker: int = _CHUNKS_PER_WORKER):
        assert threads >= 1, f'threads must be >= 1, got {threads}'
        self.threads = int(threads)
        self.chunks_per_worker = chunks_per_worker

    def _ensure_ray(self):
        if not ray.is_initialized():
            logger.info(f'starting a local ray runtime with {self.threads} cpus')
            ray.init(num_cpus=self.threads, ignore_reinit_error=True, include_dashboard=False, log_to_driver=False)

    def map(self, fn: Callable[[int], T], indices: Sequence[int]) -> List[T]:
        indices = list(indices)
        if self.threads == 1 or len(indices) <= 1:
            return [fn(r) for r in indices]
        self._ensure_ray()
        chunks = split_contiguous(indices, self.threads * self.chunks_per_worker)
        fn_ref = ray.put(fn)
        refs = [_run_chunk.remote(fn_ref, chunk) for chunk in chunks]
        out: List[T] = []
        for result in ray.get(refs):
            out.extend(result)
        return out


def resolve_pool(pool: Optional[ReplicaPool]) -> ReplicaPool:
    return pool if pool is not None else ReplicaPool(1)
