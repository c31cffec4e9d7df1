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
"""File-system helpers: outputs appear only complete (write to a temporary file, then rename)."""
import os
import tempfile
from typing import Dict, Union

__all__ = ['atomic_write', 'atomic_write_many']


def _as_bytes(data: Union[str, bytes]) -> bytes:
    return data.encode('utf-8') if isinstance(data, str) else data


def _write_temp(path: str, data: Union[str, bytes]) -> str:
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=f'.{os.path.basename(path)}.', suffix='.tmp')
    try:
        with os.fdopen(fd, 'wb') as f:
            f.write(_as_bytes(data))
            f.flush()
            os.fsync(f.fileno())
    except BaseException:
        os.unlink(tmp)
        raise
    return tmp


def atomic_write(path: str, data: Union[str, bytes]):
    os.replace(_write_temp(path, data), path)


def atomic_write_many(files: Dict[str, Union[str, bytes]]):
    """Write every file to a temporary sibling first and rename only once all writes succeeded."""
    temps = {}
    try:
        for path, data in files.items():
            temps[path] = _write_temp(path, data)
    except BaseException:
        for tmp in temps.values():
            os.unlink(tmp)
        raise
    for path, tmp in temps.items():
        os.replace(tmp, path)
