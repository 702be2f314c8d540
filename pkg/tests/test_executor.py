"""
Tests del simulador de ejecución por chunks y de la generación guiada
"""

import numpy as np
import pytest

from legato.models.enums import Strategy, StrategyFamily
from legato.models.schedule import ScheduleParams
from legato.services.executor_service import ExecutorService
from legato.services.flow_service import FlowService
from legato.services.schedule_service import ScheduleService
from legato.services.task_service import TaskService
from legato.utils.exceptions import InvalidParamsError, StrategyMismatchError


def schedule_12(d=2, r=4, s=6):
    return ScheduleService.build_schedule(ScheduleParams(d=d, r=r, s=s, H=12), 5)


def random_linear_field(seed=0):
    weights = np.random.default_rng(seed).normal(scale=0.5, size=(2, 2))

    def velocity(y, t, condition):
        return y @ weights + 1.0

    return velocity


def test_pad_last_examples():
    prev = np.arange(6, dtype=float)[:, None]
    assert np.array_equal(ExecutorService.pad_last(prev, 2)[:, 0], [2, 3, 4, 5, 5, 5])
    assert np.array_equal(ExecutorService.pad_last(prev, 0), prev)
    assert np.array_equal(ExecutorService.pad_last(prev, 6)[:, 0], [5] * 6)
    with pytest.raises(InvalidParamsError):
        ExecutorService.pad_last(prev, 7)


def test_strategy_family_compatibility():
    ExecutorService.check_compatibility(Strategy.RTC_SOFT, StrategyFamily.VANILLA)
    ExecutorService.check_compatibility(Strategy.ONESHOT, StrategyFamily.ONESHOT)
    with pytest.raises(StrategyMismatchError):
        ExecutorService.check_compatibility(Strategy.LEGATO, StrategyFamily.VANILLA)
    with pytest.raises(StrategyMismatchError):
        ExecutorService.check_compatibility(Strategy.RTC_TRAIN, StrategyFamily.LEGATO)


def test_guidance_masks():
    schedule = schedule_12()
    assert ExecutorService.guidance_mask(Strategy.LEGATO, schedule) is schedule
    assert ExecutorService.guidance_mask(Strategy.RTC_SOFT, schedule) is schedule
    hard = ExecutorService.guidance_mask(Strategy.RTC_TRAIN, schedule)
    assert np.array_equal(hard.omega, [1, 1] + [0] * 10)
    assert np.array_equal(ExecutorService.guidance_mask(Strategy.NAIVE, schedule).omega, np.zeros(12))


def test_legato_with_exact_velocity_reproduces_reference(rng):
    schedule = schedule_12()
    a_ref = rng.normal(size=(12, 2))
    eps = rng.normal(size=(12, 2))

    def exact(y, t, condition):
        return FlowService.target_velocity(a_ref, eps, schedule, t)

    chunk, drift = ExecutorService.generate_chunk(
        None, np.zeros(2), a_ref, Strategy.LEGATO, schedule, rng, velocity_fn=exact, eps=eps
    )
    assert np.max(np.abs(chunk - a_ref)) < 1e-10
    assert drift == [0.0] * 6


def test_naive_with_zero_velocity_returns_noise(rng):
    eps = rng.normal(size=(12, 2))
    chunk, _ = ExecutorService.generate_chunk(
        None, np.zeros(2), rng.normal(size=(12, 2)), Strategy.NAIVE, schedule_12(), rng,
        velocity_fn=lambda y, t, c: np.zeros_like(y), eps=eps,
    )
    assert np.array_equal(chunk, eps)


@pytest.mark.parametrize("strategy", [Strategy.LEGATO, Strategy.RTC_SOFT, Strategy.RTC_TRAIN])
def test_per_step_guidance_keeps_prefix_exact(rng, strategy):
    a_ref = rng.normal(size=(12, 2))
    chunk, drift = ExecutorService.generate_chunk(
        None, np.zeros(2), a_ref, strategy, schedule_12(), rng, velocity_fn=random_linear_field()
    )
    assert np.array_equal(chunk[:2], a_ref[:2])
    assert all(value == 0.0 for value in drift)


def test_oneshot_prefix_drifts_during_denoising(rng):
    a_ref = rng.normal(size=(12, 2))
    _, drift = ExecutorService.generate_chunk(
        None, np.zeros(2), a_ref, Strategy.ONESHOT, schedule_12(), rng, velocity_fn=random_linear_field()
    )
    assert len(drift) == 6
    assert drift[0] == 0.0
    assert drift[-1] > 0.0


def test_vanilla_net_receives_zero_condition_row(make_net, rng):
    seen = []

    def spy(y, t, condition):
        seen.append(np.array(condition))
        return np.zeros_like(y)

    net = make_net(family=StrategyFamily.VANILLA)
    ExecutorService.generate_chunk(net, np.zeros(2), np.zeros((12, 2)), Strategy.RTC_SOFT, schedule_12(), rng, velocity_fn=spy)
    assert len(seen) == 5
    assert all(np.array_equal(c, np.zeros(12)) for c in seen)

    seen.clear()
    legato = make_net(family=StrategyFamily.LEGATO)
    ExecutorService.generate_chunk(legato, np.zeros(2), np.zeros((12, 2)), Strategy.LEGATO, schedule_12(), rng, velocity_fn=spy)
    assert np.array_equal(seen[0], schedule_12().omega)


def test_generate_chunk_requires_a_velocity_source(rng):
    with pytest.raises(InvalidParamsError):
        ExecutorService.generate_chunk(None, np.zeros(2), np.zeros((12, 2)), Strategy.LEGATO, schedule_12(), rng)


def test_episode_timeline(make_net, reach_spec, exec_config):
    cfg = exec_config(d=2, s=6, r=4, max_cycles=4)
    trace = ExecutorService.run_episode(make_net(), reach_spec, cfg, np.random.default_rng(0), seed=0)

    assert trace.stream.shape == (24, 2)
    assert len(trace.cycles) == 4
    assert trace.source_cycle == [0] * 6 + [0, 0] + [1] * 4 + [1, 1] + [2] * 4 + [2, 2] + [3] * 4
    assert trace.boundary_indices == [8, 14, 20]
    assert trace.cycles[0].reference is None and not trace.cycles[0].guided
    assert all(cycle.overlap_rows == 6 and cycle.delay_rows == 2 for cycle in trace.cycles[1:])

    # Los pasos comprometidos de cada ciclo salen de las filas esperadas
    for c in range(1, 4):
        prev, new = trace.cycles[c - 1].chunk, trace.cycles[c].chunk
        frame = trace.stream[6 * c:6 * c + 6]
        assert np.array_equal(frame[:2], prev[6:8])
        assert np.array_equal(frame[2:], new[2:6])
        assert np.array_equal(trace.cycles[c].reference, ExecutorService.pad_last(prev, 6))


def test_episode_is_deterministic(make_net, reach_spec, exec_config):
    cfg = exec_config(strategy=Strategy.LEGATO)
    first = ExecutorService.run_episode(make_net(), reach_spec, cfg, np.random.default_rng(3), seed=3)
    second = ExecutorService.run_episode(make_net(), reach_spec, cfg, np.random.default_rng(3), seed=3)
    assert first.model_dump_json() == second.model_dump_json()


def test_zero_delay_has_no_delay_segments(make_net, reach_spec, exec_config):
    trace = ExecutorService.run_episode(
        make_net(), reach_spec, exec_config(d=0, s=6, r=4), np.random.default_rng(0)
    )
    assert trace.overlap_segments(delay_only=True) == []
    assert len(trace.overlap_segments()) == 3


def test_full_stride_has_no_overlap(make_net, reach_spec, exec_config):
    trace = ExecutorService.run_episode(
        make_net(), reach_spec, exec_config(d=0, s=12, r=0, max_cycles=3), np.random.default_rng(0)
    )
    assert trace.overlap_segments() == []
    assert trace.stream.shape == (36, 2)


def test_invalid_delay_rejected(make_net, reach_spec, exec_config):
    with pytest.raises(InvalidParamsError):
        ExecutorService.run_episode(make_net(), reach_spec, exec_config(d=4, s=3, r=2), np.random.default_rng(0))
    with pytest.raises(InvalidParamsError):
        ExecutorService.run_episode(make_net(), reach_spec, exec_config(d=4, s=10, r=0), np.random.default_rng(0))


def test_strategy_mismatch_rejected(make_net, reach_spec, exec_config):
    with pytest.raises(StrategyMismatchError):
        ExecutorService.run_episode(
            make_net(family=StrategyFamily.VANILLA), reach_spec, exec_config(strategy=Strategy.LEGATO),
            np.random.default_rng(0),
        )


def test_expert_oracle_completion_time(reach_spec, exec_config):
    cfg = exec_config(max_cycles=6, stop_at_goal=True)
    state = TaskService.initial_state(reach_spec)
    oracle = TaskService.expert_chunk_fn(reach_spec, state.position, goal_index=1)
    trace = ExecutorService.run_episode(None, reach_spec, cfg, np.random.default_rng(0), chunk_fn=oracle)

    expected = TaskService.expert_arrival_step(reach_spec, 1, trace.goal_tolerance)
    assert trace.reached_goal
    assert ExecutorService.completion_time(trace) == expected
    expert = TaskService.expert_trajectory(reach_spec, trace.stream.shape[0], 1)
    assert np.array_equal(trace.stream, expert)


def test_zero_policy_never_completes(reach_spec, exec_config):
    trace = ExecutorService.run_episode(
        None, reach_spec, exec_config(), np.random.default_rng(0),
        chunk_fn=lambda observation, state: np.zeros((12, 2)),
    )
    assert ExecutorService.completion_time(trace) is None
    assert not trace.reached_goal
    assert ExecutorService.completion_time(trace, goal_tolerance=np.inf) == 0
