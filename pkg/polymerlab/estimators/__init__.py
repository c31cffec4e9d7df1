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

from .replicas import (ReplicaSummary, ReplicaStats, FreeEnergyEstimate, InequalityCheck, run_replicas,
                       estimate_free_energy, jensen_sandwich, annealed_check, variance_scale_table, doubling_check,
                       doubling_means_check)
from .concentration import TailProfile, tail_profile, concentration_profile
from .rate import RateReport, convergence_gap
from .influence import (CorrelationCheck, InfluenceReport, site_influence, negative_correlation_probe,
                        influence_bound)
from .exponents import ExponentReport, scaling_exponents
