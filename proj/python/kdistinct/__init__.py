# Copyright 2026 The kdistinct Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.


"""Quantum walk simulator for element k-distinctness."""

from ._core import (
    CapExceeded,
    Instance,
    ProblemParams,
    RegimeError,
    __version__,
    asymptotic_success,
    binomial,
    classical_k_collision,
    eigenphases,
    initial_reduced_state,
    nearest_r,
    overlaps_k0,
    params_report,
    reduced_step_matrix,
    run_full,
    run_two_register,
    sample,
    step_parameters,
    success_probability,
    success_trajectory,
    verify,
    vertices,
)

__all__ = [
    "CapExceeded",
    "Instance",
    "ProblemParams",
    "RegimeError",
    "__version__",
    "asymptotic_success",
    "binomial",
    "classical_k_collision",
    "eigenphases",
    "initial_reduced_state",
    "nearest_r",
    "overlaps_k0",
    "params_report",
    "reduced_step_matrix",
    "run_full",
    "run_two_register",
    "sample",
    "step_parameters",
    "success_probability",
    "success_trajectory",
    "verify",
    "vertices",
]
