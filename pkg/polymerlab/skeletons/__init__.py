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

from .skeleton import (ScaleFns, scale_functions, simple_skeleton, enumerate_skeletons, count_skeletons,
                       decomposition_check, block_factorization_residual, is_coarse_grained, coarse_grained_skeletons)
from .smap import SMap, Classification, s_map, classify, subadditivity_check, origin_inefficiency_table
