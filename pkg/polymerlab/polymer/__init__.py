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

from .transfer import (PolymerParams, LogZField, Skeleton, OccupationField, iter_forward_fields, forward_fields,
                       log_partition, log_partition_p2p, log_partition_shifted, log_partition_between,
                       log_partition_skeleton, endpoint_distribution, mean_square_displacement,
                       occupation_probabilities, max_path_weight)
from .oracle import brute_force_log_partition
