"""
Tests de la suite analítica (oráculo sin modelo)
"""

import numpy as np

from legato.models.enums import Activation
from legato.services.flow_service import FlowService
from legato.services.oracle_service import OracleService


def test_full_suite_passes():
    results = OracleService.run_all(seed=0, cases=100)
    assert [r.name for r in results if not r.passed] == []
    assert len(results) == 7


def test_every_step_count_is_consistent():
    result = OracleService.check_path_consistency(np.random.default_rng(1), cases=40, max_steps=20)
    assert result.passed
    assert result.value <= 1e-10


def test_sign_error_in_target_is_detected():
    def flipped(a, eps, omega, t, n_steps=None):
        return -FlowService.target_velocity(a, eps, omega, t, n_steps)

    result = OracleService.check_path_consistency(np.random.default_rng(2), cases=20, target_fn=flipped)
    assert not result.passed
    assert result.value > 1e-3


def test_prefix_is_exact_bit_for_bit():
    result = OracleService.check_prefix_exactness(np.random.default_rng(3), cases=50)
    assert result.passed and result.value == 0.0


def test_random_schedules_are_valid():
    rng = np.random.default_rng(4)
    for _ in range(200):
        schedule = OracleService.random_schedule(rng, int(rng.integers(1, 30)), 5)
        assert np.all(np.diff(schedule.omega) <= 0.0)
        assert np.all((schedule.omega >= 0.0) & (schedule.omega <= 1.0))


def test_gradient_checks_for_both_activations():
    for activation in (Activation.IDENTITY, Activation.TANH):
        assert OracleService.check_gradients(np.random.default_rng(5), activation).passed
