"""
Tests de la política: entrada condicionada, forward, pérdida, gradientes y entrenamiento
"""

import numpy as np
import pytest

from legato.models.enums import Activation, StrategyFamily, TaskName
from legato.models.policy import TrainConfig, TrainingBatch
from legato.services.policy_service import AdamOptimizer, PolicyService
from legato.services.task_service import TaskService
from legato.utils.exceptions import (
    CheckpointMismatchError,
    DimensionMismatchError,
    DivergenceError,
    InvalidParamsError,
)


def dataset_batch(spec, n=32, seed=0):
    dataset = TaskService.generate_dataset(spec, np.random.default_rng(seed))
    return dataset.observations[:n], dataset.chunks[:n]


def test_condition_row_appended_as_last_column():
    conditioned = PolicyService.attach_condition_row(np.zeros((3, 2)), np.array([1.0, 0.5, 0.0]))
    assert conditioned.shape == (3, 3)
    assert np.array_equal(conditioned[:, -1], [1.0, 0.5, 0.0])
    assert np.array_equal(PolicyService.strip_condition_row(conditioned), np.zeros((3, 2)))


def test_condition_row_disabled_is_zero_filled(rng):
    y = rng.normal(size=(3, 2))
    conditioned = PolicyService.attach_condition_row(y, np.array([1.0, 0.5, 0.0]), enabled=False)
    assert np.array_equal(conditioned[:, :2], y)
    assert np.array_equal(conditioned[:, -1], np.zeros(3))


def test_zero_parameters_give_zero_velocity(make_net, rng):
    net = make_net()
    net.theta[:] = 0.0
    out = PolicyService.forward(net, rng.normal(size=(12, 2)), np.zeros(2), 0.4, np.zeros(12))
    assert out.shape == (12, 2)
    assert np.array_equal(out, np.zeros((12, 2)))


def test_forward_is_deterministic(make_net, rng):
    net = make_net(seed=7)
    y = rng.normal(size=(12, 2))
    first = PolicyService.forward(net, y, np.ones(2), 0.2, np.linspace(1, 0, 12))
    second = PolicyService.forward(net, y, np.ones(2), 0.2, np.linspace(1, 0, 12))
    assert np.array_equal(first, second)


def test_forward_rejects_incompatible_inputs(make_net):
    net = make_net()
    with pytest.raises(DimensionMismatchError):
        PolicyService.forward(net, np.zeros((10, 2)), np.zeros(2), 0.0, np.zeros(10))
    with pytest.raises(DimensionMismatchError):
        PolicyService.forward(net, np.zeros((12, 2)), np.zeros(3), 0.0, np.zeros(12))


def test_loss_is_zero_when_net_outputs_target(make_net, rng):
    net = make_net(seed=3)
    inputs = PolicyService.build_inputs(net.descriptor, rng.normal(size=(4, 12, 2)), np.zeros(2), 0.5, np.zeros(12))
    outputs, _ = PolicyService._forward_pass(net, inputs)
    batch = TrainingBatch(inputs=inputs, targets=outputs.copy(), mask=np.ones_like(outputs))
    loss, grad = PolicyService.loss_and_grad(net, batch)
    assert loss == 0.0
    assert np.array_equal(grad, np.zeros_like(grad))


def test_empty_loss_mask_rejected(make_net, rng):
    net = make_net()
    inputs = PolicyService.build_inputs(net.descriptor, rng.normal(size=(2, 12, 2)), np.zeros(2), 0.5, np.zeros(12))
    batch = TrainingBatch(inputs=inputs, targets=np.zeros((2, 24)), mask=np.zeros((2, 24)))
    with pytest.raises(InvalidParamsError):
        PolicyService.loss_and_grad(net, batch)


def test_zero_weights_reduce_to_flow_matching(make_net, reach_spec, small_train_config):
    net = make_net()
    obs, chunks = dataset_batch(reach_spec)
    fixed = small_train_config.model_copy(update={"d_range": (0, 0), "r_range": (0, 0)})
    vanilla = small_train_config.model_copy(update={"family": StrategyFamily.VANILLA})

    legato_batch = PolicyService.build_batch(net, fixed, obs, chunks, np.random.default_rng(9))
    vanilla_batch = PolicyService.build_batch(net, vanilla, obs, chunks, np.random.default_rng(9))
    assert np.array_equal(legato_batch.targets, vanilla_batch.targets)
    assert np.array_equal(legato_batch.inputs, vanilla_batch.inputs)


def _condition_column(batch, horizon=12, action_dim=2):
    size = batch.size
    return batch.inputs[:, :horizon * (action_dim + 1)].reshape(size, horizon, action_dim + 1)[..., -1]


def test_rtc_training_masks_prefix_rows(make_net, reach_spec, small_train_config):
    net = make_net(family=StrategyFamily.RTC_TRAIN)
    obs, chunks = dataset_batch(reach_spec)
    cfg = small_train_config.model_copy(update={"family": StrategyFamily.RTC_TRAIN})
    batch = PolicyService.build_batch(net, cfg, obs, chunks, np.random.default_rng(2))

    weights = _condition_column(batch)
    assert set(np.unique(weights)) <= {0.0, 1.0}
    row_mask = batch.mask.reshape(batch.size, 12, 2)
    assert np.array_equal(row_mask[..., 0], 1.0 - weights)
    assert np.array_equal(row_mask[..., 1], 1.0 - weights)


def test_oneshot_targets_vanish_on_guided_prefix(make_net, reach_spec, small_train_config):
    net = make_net(family=StrategyFamily.ONESHOT)
    obs, chunks = dataset_batch(reach_spec)
    cfg = small_train_config.model_copy(update={"family": StrategyFamily.ONESHOT, "d_range": (2, 3)})
    batch = PolicyService.build_batch(net, cfg, obs, chunks, np.random.default_rng(4))

    weights = _condition_column(batch)
    targets = batch.targets.reshape(batch.size, 12, 2)
    assert np.all(weights[:, :2] == 1.0)
    assert np.array_equal(targets[:, :2], np.zeros_like(targets[:, :2]))
    assert np.all(batch.mask == 1.0)


def test_condition_row_ablation_changes_only_input_layout(make_net, small_descriptor, reach_spec, small_train_config):
    with_row = make_net()
    without_row = PolicyService.init_net(
        small_descriptor.model_copy(update={"condition_row": False}), np.random.default_rng(0)
    )
    obs, chunks = dataset_batch(reach_spec)
    on = PolicyService.build_batch(with_row, small_train_config, obs, chunks, np.random.default_rng(5))
    off = PolicyService.build_batch(without_row, small_train_config, obs, chunks, np.random.default_rng(5))

    assert np.array_equal(on.targets, off.targets)
    assert np.array_equal(_condition_column(off), np.zeros((on.size, 12)))
    width = 12 * 3
    on_rows = on.inputs[:, :width].reshape(on.size, 12, 3)
    off_rows = off.inputs[:, :width].reshape(off.size, 12, 3)
    assert np.array_equal(on_rows[..., :2], off_rows[..., :2])
    assert np.array_equal(on.inputs[:, width:], off.inputs[:, width:])


def test_gradient_of_linear_net_is_exact(make_net, reach_spec, small_train_config):
    net = make_net(activation=Activation.IDENTITY)
    obs, chunks = dataset_batch(reach_spec, n=8)
    batch = PolicyService.build_batch(net, small_train_config, obs, chunks, np.random.default_rng(0))
    error = PolicyService.grad_check(net, batch, h=1e-3, n_checks=60)
    assert error < 1e-5


def test_gradient_of_tanh_net(make_net, reach_spec, small_train_config):
    net = make_net(activation=Activation.TANH)
    obs, chunks = dataset_batch(reach_spec, n=8)
    batch = PolicyService.build_batch(net, small_train_config, obs, chunks, np.random.default_rng(1))
    error = PolicyService.grad_check(net, batch, h=1e-5, n_checks=60)
    assert error < 1e-4


def test_corrupted_gradient_detected(make_net, reach_spec, small_train_config):
    net = make_net()
    obs, chunks = dataset_batch(reach_spec, n=8)
    batch = PolicyService.build_batch(net, small_train_config, obs, chunks, np.random.default_rng(1))

    def flipped(theta):
        return -PolicyService.loss_and_grad(net, batch, theta)[1]

    assert PolicyService.grad_check(net, batch, h=1e-5, n_checks=60, grad_fn=flipped) > 1e-2


def test_training_reduces_loss(make_net, reach_spec, small_train_config):
    net = make_net(seed=1)
    dataset = TaskService.generate_dataset(reach_spec, np.random.default_rng(0))
    cfg = small_train_config.model_copy(update={"steps": 500})
    curve = PolicyService.train(net, dataset, cfg, np.random.default_rng(2))
    assert len(curve) == 500
    assert np.mean(curve[-20:]) < np.mean(curve[:20])


def test_training_is_deterministic(make_net, reach_spec, small_train_config):
    dataset = TaskService.generate_dataset(reach_spec, np.random.default_rng(0))
    first = PolicyService.train(make_net(seed=1), dataset, small_train_config, np.random.default_rng(2))
    second = PolicyService.train(make_net(seed=1), dataset, small_train_config, np.random.default_rng(2))
    assert first == second


def test_non_finite_loss_raises_divergence(make_net, reach_spec, small_train_config):
    net = make_net()
    net.theta[:] = np.nan
    obs, chunks = dataset_batch(reach_spec, n=4)
    optimizer = AdamOptimizer.from_config(net.descriptor.n_params, small_train_config)
    with pytest.raises(DivergenceError):
        PolicyService.training_step(net, optimizer, obs, chunks, np.random.default_rng(0), small_train_config)


def test_checkpoint_records_default_schedule_ranges(make_net):
    cfg = TrainConfig(family=StrategyFamily.LEGATO)
    checkpoint = PolicyService.to_checkpoint(make_net(), TaskName.BIMODAL_REACH, cfg, steps_done=0)
    assert tuple(checkpoint.train_config.d_range) == (0, 10)
    assert tuple(checkpoint.train_config.r_range) == (0, 50)
    assert np.array_equal(checkpoint.to_net().theta, checkpoint.theta)


def test_checkpoint_architecture_mismatch(make_net, small_descriptor):
    checkpoint = PolicyService.to_checkpoint(make_net(), TaskName.BIMODAL_REACH, TrainConfig(), steps_done=0)
    PolicyService.check_checkpoint(checkpoint, small_descriptor)
    with pytest.raises(CheckpointMismatchError):
        PolicyService.check_checkpoint(checkpoint, small_descriptor.model_copy(update={"hidden_sizes": [8]}))


def test_schedule_ranges_must_fit_dataset(reach_spec):
    dataset = TaskService.generate_dataset(reach_spec, np.random.default_rng(0))
    with pytest.raises(InvalidParamsError):
        PolicyService.training_dataset_check(dataset, TrainConfig())
