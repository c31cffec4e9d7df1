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
Contain small python utility functions
"""

from typing import Any, List, Sequence


def split_contiguous(items: Sequence[Any], num_chunks: int) -> List[List[Any]]:
    """Split into at most num_chunks contiguous, nonempty, nearly equal chunks (order preserved)."""
    items = list(items)
    num_chunks = max(1, min(num_chunks, len(items)))
    base, extra = divmod(len(items), num_chunks)
    chunks, begin = [], 0
    for i in range(num_chunks):
        end = begin + base + (1 if i < extra else 0)
        chunks.append(items[begin:end])
        begin = end
    return [c for c in chunks if c]
