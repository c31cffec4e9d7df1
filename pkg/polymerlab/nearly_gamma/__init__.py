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

from .density import DensitySpec, density_from_model, density_from_table, load_density_table
from .certify import (Side, ConditionVerdict, NearlyGammaReport, psi, psi_with_flag, fit_envelope, check_condition_iv,
                      check_condition_v, gaussian_transport, exp_moment_certificate, certify)
