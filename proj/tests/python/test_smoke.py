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


import math

import numpy as np
import pytest

import kdistinct as kd


def test_nearest_r_and_params():
    assert kd.nearest_r(10000, 2) == 464
    p = kd.ProblemParams(8, 2)
    assert (p.n, p.k, p.r, p.m) == (8, 2, 4, 8)
    assert p.reduced_regime
    assert kd.step_parameters(kd.ProblemParams(10000, 2)) == (17, 24)


def test_regime_error_maps_to_value_error():
    with pytest.raises(ValueError):
        kd.success_probability(kd.ProblemParams(10, 8), 1, 1)


def test_reduced_matches_full():
    p = kd.ProblemParams(8, 2)
    inst = kd.Instance.random_unique(8, 2, 8, 3)
    amps, prob = kd.run_full(p, inst, 2, 2)
    assert len(amps) == 280
    assert abs(np.linalg.norm(amps) - 1) < 1e-12
    assert abs(prob - kd.success_probability(p, 2, 2)) < 1e-10
    assert abs(prob - 0.532237714285714) < 1e-12


def test_step_matrix_is_orthogonal():
    u = kd.reduced_step_matrix(kd.ProblemParams(200, 3))
    assert u.shape == (7, 7)
    assert np.allclose(u @ u.T, np.eye(7), atol=1e-12)
    phis = np.sort(np.abs(np.angle(np.linalg.eigvals(u))))
    closed = kd.eigenphases(kd.ProblemParams(200, 3))
    for phi in closed:
        assert np.min(np.abs(phis - phi)) < 1e-9


def test_two_register_marginal():
    p = kd.ProblemParams(5, 2, r=3, m=4)
    inst = kd.Instance.random_unique(5, 2, 4, 1)
    res = kd.run_two_register(p, inst, 1, 1)
    amps, _ = kd.run_full(p, inst, 1, 1)
    assert res["violations"] == 0
    assert np.allclose(res["marginal"], np.abs(np.asarray(amps)) ** 2, atol=1e-10)


def test_sample_is_deterministic():
    p = kd.ProblemParams(8, 2)
    inst = kd.Instance.random_unique(8, 2, 8, 1)
    a = kd.sample(p, inst, 2, 2, 2000, seed=5)
    b = kd.sample(p, inst, 2, 2, 2000, seed=5)
    assert a == b
    assert a["within_3_sigma"]


def test_report_and_verify():
    rep = kd.params_report(10000, 2)
    assert rep["r"] == 464
    assert math.isclose(rep["p_succ"]["closed_params"], 0.978946, abs_tol=1e-5)
    assert rep["steps"]["closed"] == {"t1": 17, "t2": 24}
    checks = kd.verify(skip=["full", "microsim"])
    assert checks and all(c["passed"] for c in checks)


def test_collision_helpers():
    assert kd.classical_k_collision([5, 2, 5], 2) == [1, 3]
    inst = kd.Instance.from_values([1, 2, 1, 3], 2)
    assert inst.colliding_set == [1, 3]
    assert len(kd.vertices(5, 2)) == 30
