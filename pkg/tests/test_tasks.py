"""
Tests de las tareas sintéticas y del experto
"""

import numpy as np
import pytest

from legato.models.enums import TaskName
from legato.models.metric import CommandStream
from legato.schemas.config_schema import TaskSpecSchema
from legato.services.metrics_service import MetricsService
from legato.services.task_service import TaskService
from legato.utils.exceptions import InvalidParamsError, NonFiniteActionError, ShapeMismatchError


def test_noise_free_reach_chunks_integrate_to_goal(reach_spec):
    dataset = TaskService.generate_dataset(reach_spec, np.random.default_rng(0))
    goals = TaskService.goals(reach_spec)
    for index in range(len(dataset)):
        demo = dataset.demonstration(index)
        end = demo.start_position + demo.chunk.sum(axis=0)
        assert np.allclose(end, goals[demo.mode], rtol=0, atol=1e-12)


def test_mode_label_matches_goal_side(reach_spec):
    dataset = TaskService.generate_dataset(reach_spec, np.random.default_rng(1))
    for index in range(len(dataset)):
        demo = dataset.demonstration(index)
        end = demo.start_position + demo.chunk.sum(axis=0)
        assert TaskService.mode_of(reach_spec, end) == demo.mode


@pytest.mark.parametrize("goal_index", [0, 1])
def test_chunk_mode_agrees_with_reached_side_on_reach(reach_spec, goal_index):
    horizon = reach_spec.horizon
    tolerance = TaskService.goal_tolerance(reach_spec, 0.05)
    stream = TaskService.expert_trajectory(reach_spec, 4 * horizon, goal_index)
    for start in range(0, 3 * horizon, 3):
        here = stream[:start].sum(axis=0)
        chunk = stream[start:start + horizon]
        by_shift = TaskService.chunk_mode(reach_spec, here, chunk, tolerance)
        by_side = TaskService.mode_of(reach_spec, here + chunk.sum(axis=0))
        assert by_shift == by_side == goal_index


def test_chunk_mode_follows_x_shift(reach_spec):
    position = np.array([-0.8, 0.0])
    chunk = np.zeros((12, 2))
    chunk[:, 0] = 0.02
    assert TaskService.chunk_mode(reach_spec, position, chunk, 0.05) == 1
    assert TaskService.mode_of(reach_spec, position + chunk.sum(axis=0)) == 0
    # casi en reposo: decide el lado alcanzado
    assert TaskService.chunk_mode(reach_spec, position, 0.1 * chunk, 0.05) == 0


def test_pour_has_a_single_mode(pour_spec):
    horizon = pour_spec.horizon
    tolerance = TaskService.goal_tolerance(pour_spec, 0.05)
    stream = TaskService.expert_trajectory(pour_spec, 3 * pour_spec.period)
    for start in range(0, 2 * pour_spec.period, 4):
        here = stream[:start].sum(axis=0)
        chunk = stream[start:start + horizon]
        assert TaskService.chunk_mode(pour_spec, here, chunk, tolerance) == 0
        assert TaskService.mode_of(pour_spec, here + chunk.sum(axis=0)) == 0


def test_generation_is_deterministic(reach_spec):
    first = TaskService.generate_dataset(reach_spec, np.random.default_rng(42))
    second = TaskService.generate_dataset(reach_spec, np.random.default_rng(42))
    assert np.array_equal(first.chunks, second.chunks)
    assert np.array_equal(first.observations, second.observations)
    assert first.modes == second.modes


def test_mode_balance():
    dataset = TaskService.gen_bimodal_reach(np.random.default_rng(0), 10_000, 12, 0.02)
    fraction = np.mean(dataset.modes)
    assert 0.45 <= fraction <= 0.55


def test_noisy_starts_still_reach_goal():
    spec = TaskSpecSchema(name=TaskName.BIMODAL_REACH, horizon=12, noise_scale=0.05)
    dataset = TaskService.gen_bimodal_reach(np.random.default_rng(3), 64, 12, 0.05, spec)
    ends = dataset.start_positions + dataset.chunks.sum(axis=1)
    goals = TaskService.goals(spec)[dataset.modes]
    assert np.allclose(ends, goals, rtol=0, atol=1e-12)


def test_invalid_generator_params():
    with pytest.raises(InvalidParamsError):
        TaskService.gen_bimodal_reach(np.random.default_rng(0), 0, 12, 0.0)
    with pytest.raises(InvalidParamsError):
        TaskService.gen_oscillating_pour(np.random.default_rng(0), 4, 12, 0)


def test_pour_dataset_shapes(pour_spec):
    dataset = TaskService.generate_dataset(pour_spec, np.random.default_rng(0))
    assert dataset.chunks.shape == (pour_spec.n_demos, 12, 2)
    assert dataset.observations.shape == (pour_spec.n_demos, 4)
    assert set(dataset.modes) == {0}


def test_pour_expert_nsparc_is_reproducible(pour_spec):
    values = []
    for _ in range(2):
        stream = TaskService.expert_trajectory(pour_spec, 96)
        values.append(MetricsService.nsparc(CommandStream(samples=stream, dt=1 / 30)))
    assert abs(values[0] - values[1]) <= 1e-12


def test_pour_period_sets_dominant_frequency(pour_spec):
    """Duplicar el periodo corre el pico espectral a la mitad de la frecuencia"""
    length = 480
    peaks = []
    for period in (16, 32):
        spec = pour_spec.model_copy(update={"period": period})
        stream = TaskService.expert_trajectory(spec, length)
        spectrum = np.abs(np.fft.rfft(stream[:, 1]))
        peaks.append(int(np.argmax(spectrum[1:]) + 1))
    assert peaks[0] == 2 * peaks[1]


def test_pour_returns_to_start_after_each_period(pour_spec):
    stream = TaskService.expert_trajectory(pour_spec, 3 * pour_spec.period)
    positions = np.cumsum(stream, axis=0)
    for k in (1, 2, 3):
        assert np.allclose(positions[k * pour_spec.period - 1], 0.0, atol=1e-12)


def test_zero_action_keeps_position(reach_spec):
    state = TaskService.initial_state(reach_spec)
    moved = TaskService.rollout_env(state, np.zeros(2))
    assert np.array_equal(moved.position, state.position)
    assert moved.time == state.time + 1


def test_rollout_is_associative(reach_spec, rng):
    state = TaskService.initial_state(reach_spec)
    actions = rng.normal(size=(10, 2))
    whole = TaskService.rollout_chunk(state, actions)
    split = TaskService.rollout_chunk(TaskService.rollout_chunk(state, actions[:4]), actions[4:])
    assert np.array_equal(whole.position, split.position)
    assert whole.time == split.time == 10


def test_non_finite_action_rejected(reach_spec):
    with pytest.raises(NonFiniteActionError):
        TaskService.rollout_env(TaskService.initial_state(reach_spec), np.array([np.nan, 0.0]))


def test_demo_chunk_rolls_out_to_its_goal(reach_spec):
    dataset = TaskService.generate_dataset(reach_spec, np.random.default_rng(0))
    goals = TaskService.goals(reach_spec)
    demo = dataset.demonstration(0)
    state = TaskService.initial_state(reach_spec).model_copy(update={"position": demo.start_position})
    final = TaskService.rollout_chunk(state, demo.chunk)
    assert np.allclose(final.position, goals[demo.mode], rtol=0, atol=1e-12)


def test_chunk_and_concat(rng):
    stream = rng.normal(size=(36, 2))
    chunks = TaskService.chunk_stream(stream, 12)
    assert chunks.shape == (3, 12, 2)
    assert np.array_equal(TaskService.concat_chunks(chunks), stream)
    with pytest.raises(ShapeMismatchError):
        TaskService.chunk_stream(stream[:35], 12)


def test_expert_arrival_step(reach_spec):
    tolerance = TaskService.goal_tolerance(reach_spec, 0.05)
    step = TaskService.expert_arrival_step(reach_spec, 1, tolerance)
    assert step is not None
    assert 0 < step <= TaskService.reach_steps(reach_spec)
    assert TaskService.expert_arrival_step(reach_spec, 0, np.inf) == 0


def test_first_arrival_respects_min_steps():
    stream = np.zeros((5, 2))
    goals = np.zeros((1, 2))
    assert TaskService.first_arrival(np.zeros(2), stream, goals, 0.1) == 0
    assert TaskService.first_arrival(np.zeros(2), stream, goals, 0.1, min_steps=3) == 3
    assert TaskService.first_arrival(np.ones(2), stream, goals, 0.1) is None
