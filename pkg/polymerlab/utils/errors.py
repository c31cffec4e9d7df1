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
Exceptions shared by every polymerlab module. The experiment runner maps them to exit codes.
"""

from typing import Any, Dict, List, Optional

__all__ = ['ConfigValidationError', 'DomainError', 'ResourceCapExceeded', 'NumericFailure']


class ConfigValidationError(ValueError):
    """All problems found in one configuration, not just the first."""

    def __init__(self, errors: List[str]):
        self.errors = list(errors)
        super().__init__('; '.join(self.errors))


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ResourceCapExceeded(RuntimeError):

    def __init__(self, what: str, estimate: float, cap: float):
        self.what = what
        self.estimate = estimate
        self.cap = cap
        super().__init__(f'{what}: estimate {estimate:g} exceeds cap {cap:g}')


class NumericFailure(ArithmeticError):

    def __init__(self, message: str, diagnostics: Optional[Dict[str, Any]] = None):
        self.diagnostics = dict(diagnostics or {})
        super().__init__(message)
