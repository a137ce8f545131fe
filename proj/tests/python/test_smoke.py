import math

import numpy as np
import pytest

import rhodec


def test_mav_domain_is_valid():
    m = rhodec.build_mav_domain()
    assert m.num_states == 8
    assert m.num_joint_actions == 4
    assert rhodec.validate_model(m) == []


def test_entropy_and_rho():
    assert rhodec.shannon_entropy([0.125] * 8) == pytest.approx(3.0)
    m = rhodec.build_mav_domain()
    hostile_l1 = [0.0] * 4 + [1.0] + [0.0] * 3
    assert rhodec.rho_reward(m, hostile_l1, 3) == pytest.approx(-1.2)


def test_belief_update_normalizes():
    m = rhodec.build_mav_domain()
    total = 0.0
    for z in range(16):
        post, eta = rhodec.belief_update(m, m.initial_belief, 1, z)
        assert sum(post) == pytest.approx(1.0)
        total += eta
    assert total == pytest.approx(1.0)


def test_solve_dominates_baselines():
    m = rhodec.build_mav_domain()
    result = rhodec.solve_maastar(m, 3)
    assert result.optimal
    assert result.value == pytest.approx(rhodec.policy_value(m, result.policy, 3))
    for kind in ["cameras_only", "fixed_roles_1", "turn_taking_1"]:
        pi = rhodec.baseline_policy(kind, 3)
        assert result.value >= rhodec.policy_value(m, pi, 3) - 1e-12
    assert result.value <= rhodec.centralized_pomdp_bound(m, 3) + 1e-12


def test_policy_json_round_trip():
    m = rhodec.build_mav_domain()
    pi = rhodec.solve_maastar(m, 2).policy
    assert rhodec.read_policy(m, rhodec.write_policy(m, pi)) == pi


def test_policy_counts_are_exact():
    full, tree = rhodec.count_local_policies(2, 4, 3)
    assert full == 2**73
    assert tree == 2**21


def test_model_text_round_trip():
    m = rhodec.build_mav_domain(p_neutral=0.3)
    text = rhodec.write_model(m)
    back = rhodec.parse_model(text)
    assert rhodec.write_model(back) == text
    with pytest.raises(rhodec.InvalidArgument):
        rhodec.parse_model(text.replace("states:", "", 1))


def test_simulation_and_stats():
    m = rhodec.build_mav_domain()
    totals = rhodec.simulate(m, "cameras_only", decisions=9, runs=5, seed=2)
    assert len(totals) == 5
    assert totals == rhodec.simulate(m, "cameras_only", decisions=9, runs=5, seed=2)
    mean, half = rhodec.aggregate_stats([1.0, 2.0, 3.0])
    assert mean == pytest.approx(2.0)
    assert half == pytest.approx(1.96 / math.sqrt(3.0))
    with pytest.raises(rhodec.InsufficientData):
        rhodec.aggregate_stats([1.0])


def test_tracking_helpers():
    trk = rhodec.tracking
    assert trk.differential_entropy(np.eye(2)) == pytest.approx(
        math.log(2 * math.pi * math.e))
    mean, cov = trk.kf_step(np.zeros(4), np.eye(4), np.array([0.5, -0.5]))
    assert cov.shape == (4, 4)
    assert np.allclose(cov, cov.T)
    mass, cell = trk.discretize_belief(np.zeros(4), np.eye(4))
    assert sum(mass) == pytest.approx(1.0)
    assert cell == pytest.approx(1.2)
    run = trk.simulate("scanning", steps=5, seed=1)
    assert len(run["entropy"]) == 5
