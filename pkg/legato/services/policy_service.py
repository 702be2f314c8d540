"""
Servicio de la política f_theta(Y, o, t, omega)
MLP en numpy con backprop escrita a mano, optimizador Adam y bucle de entrenamiento
"""

import logging
from typing import Callable, List, Optional, Tuple, Union

import numpy as np

from legato.models.enums import Activation, StrategyFamily, TaskName
from legato.models.policy import (
    ArchitectureDescriptor,
    CheckpointArtifact,
    PolicyNet,
    TrainConfig,
    TrainingBatch,
)
from legato.models.schedule import GuidanceSchedule
from legato.models.task import DatasetArtifact
from legato.services.flow_service import FlowService
from legato.services.schedule_service import ScheduleService
from legato.utils.exceptions import (
    CheckpointMismatchError,
    DimensionMismatchError,
    DivergenceError,
    InvalidParamsError,
    ShapeMismatchError,
)

logger = logging.getLogger(__name__)

GradFn = Callable[[np.ndarray], np.ndarray]


class AdamOptimizer:
    """Adam sobre el vector plano de parámetros; actualiza in-place"""

    def __init__(
        self,
        n_params: int,
        learning_rate: float,
        beta1: float = 0.9,
        beta2: float = 0.999,
        eps: float = 1e-8,
    ):
        self.learning_rate = learning_rate
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.m = np.zeros(n_params)
        self.v = np.zeros(n_params)
        self.step_count = 0

    @classmethod
    def from_config(cls, n_params: int, cfg: TrainConfig) -> "AdamOptimizer":
        return cls(n_params, cfg.learning_rate, cfg.beta1, cfg.beta2, cfg.adam_eps)

    def step(self, theta: np.ndarray, grad: np.ndarray) -> None:
        self.step_count += 1
        self.m = self.beta1 * self.m + (1.0 - self.beta1) * grad
        self.v = self.beta2 * self.v + (1.0 - self.beta2) * grad * grad
        m_hat = self.m / (1.0 - self.beta1 ** self.step_count)
        v_hat = self.v / (1.0 - self.beta2 ** self.step_count)
        theta -= self.learning_rate * m_hat / (np.sqrt(v_hat) + self.eps)


def _activate(z: np.ndarray, activation: Activation) -> np.ndarray:
    return np.tanh(z) if activation == Activation.TANH else z


def _activation_grad(h: np.ndarray, activation: Activation) -> np.ndarray:
    """Derivada expresada en la salida de la activación"""
    return 1.0 - h * h if activation == Activation.TANH else np.ones_like(h)


class PolicyService:

    # --- Arquitectura ---

    @staticmethod
    def descriptor_for(horizon: int, action_dim: int, obs_dim: int, cfg: TrainConfig) -> ArchitectureDescriptor:
        return ArchitectureDescriptor(
            horizon=horizon,
            action_dim=action_dim,
            obs_dim=obs_dim,
            hidden_sizes=list(cfg.hidden_sizes),
            activation=cfg.activation,
            time_embedding_dim=cfg.time_embedding_dim,
            condition_row=cfg.condition_row,
        )

    @staticmethod
    def init_net(
        descriptor: ArchitectureDescriptor,
        rng: np.random.Generator,
        family: StrategyFamily = StrategyFamily.LEGATO,
    ) -> PolicyNet:
        """Pesos N(0, 1/fan_in) y sesgos en cero"""
        net = PolicyNet(descriptor=descriptor, family=family, theta=np.zeros(descriptor.n_params))
        for w, b in net.layers():
            w[...] = rng.standard_normal(w.shape) / np.sqrt(w.shape[0])
            b[...] = 0.0
        return net

    # --- Entrada de la red ---

    @staticmethod
    def time_embedding(t, n_frequencies: int) -> np.ndarray:
        """[t, sin(2 pi k t), cos(2 pi k t)] para k = 1..K"""
        tt = np.atleast_1d(np.asarray(t, dtype=np.float64))
        freqs = np.arange(1, n_frequencies + 1)
        angles = 2.0 * np.pi * tt[:, None] * freqs[None, :]
        return np.concatenate([tt[:, None], np.sin(angles), np.cos(angles)], axis=1)

    @staticmethod
    def attach_condition_row(
        y: np.ndarray,
        omega: Union[GuidanceSchedule, np.ndarray],
        enabled: bool = True,
    ) -> np.ndarray:
        """Agrega omega como columna Da; con enabled=False la columna va en cero"""
        w = omega.omega if isinstance(omega, GuidanceSchedule) else np.asarray(omega, dtype=np.float64)
        if w.shape[-1] != y.shape[-2]:
            raise ShapeMismatchError(f"largo de omega {w.shape[-1]} != H={y.shape[-2]}")
        try:
            column = np.broadcast_to(w, y.shape[:-1])
        except ValueError:
            raise ShapeMismatchError(f"omega {w.shape} no se difunde sobre el chunk {y.shape}")
        if not enabled:
            column = np.zeros(y.shape[:-1])
        return np.concatenate([y, column[..., None]], axis=-1)

    @staticmethod
    def strip_condition_row(conditioned: np.ndarray) -> np.ndarray:
        return conditioned[..., :-1].copy()

    @staticmethod
    def build_inputs(
        descriptor: ArchitectureDescriptor,
        y: np.ndarray,
        observation: np.ndarray,
        t,
        omega: Union[GuidanceSchedule, np.ndarray],
    ) -> np.ndarray:
        """Entrada plana (B, input_dim): chunk condicionado, observación y embedding de t"""
        chunks = y[None] if y.ndim == 2 else y
        batch = chunks.shape[0]
        if chunks.shape[1:] != (descriptor.horizon, descriptor.action_dim):
            raise DimensionMismatchError(
                f"chunk {chunks.shape[1:]} incompatible con la red "
                f"({descriptor.horizon}, {descriptor.action_dim})"
            )

        obs = np.atleast_2d(np.asarray(observation, dtype=np.float64))
        if obs.shape[-1] != descriptor.obs_dim:
            raise DimensionMismatchError(f"observación de dimensión {obs.shape[-1]} != {descriptor.obs_dim}")
        obs = np.broadcast_to(obs, (batch, descriptor.obs_dim))

        times = np.broadcast_to(np.atleast_1d(np.asarray(t, dtype=np.float64)), (batch,))
        conditioned = PolicyService.attach_condition_row(chunks, omega, descriptor.condition_row)

        return np.concatenate(
            [
                conditioned.reshape(batch, -1),
                obs,
                PolicyService.time_embedding(times, descriptor.time_embedding_dim),
            ],
            axis=1,
        )

    # --- Forward / backward ---

    @staticmethod
    def _forward_pass(
        net: PolicyNet,
        inputs: np.ndarray,
        theta: Optional[np.ndarray] = None,
    ) -> Tuple[np.ndarray, List[np.ndarray]]:
        if inputs.shape[-1] != net.descriptor.input_dim:
            raise DimensionMismatchError(f"entrada de dimensión {inputs.shape[-1]} != {net.descriptor.input_dim}")

        layers = net.layers(theta)
        activations = [inputs]
        h = inputs
        for index, (w, b) in enumerate(layers):
            z = h @ w + b
            h = z if index == len(layers) - 1 else _activate(z, net.descriptor.activation)
            activations.append(h)
        return h, activations

    @staticmethod
    def forward(
        net: PolicyNet,
        y: np.ndarray,
        observation: np.ndarray,
        t,
        omega: Union[GuidanceSchedule, np.ndarray],
    ) -> np.ndarray:
        """Velocidad predicha, misma forma que `y` (H x Da o B x H x Da)"""
        inputs = PolicyService.build_inputs(net.descriptor, y, observation, t, omega)
        out, _ = PolicyService._forward_pass(net, inputs)
        return out.reshape(y.shape)

    @staticmethod
    def loss(net: PolicyNet, batch: TrainingBatch, theta: Optional[np.ndarray] = None) -> float:
        out, _ = PolicyService._forward_pass(net, batch.inputs, theta)
        residual = (out - batch.targets) * batch.mask
        return float(np.sum(residual * residual) / np.sum(batch.mask))

    @staticmethod
    def loss_and_grad(
        net: PolicyNet,
        batch: TrainingBatch,
        theta: Optional[np.ndarray] = None,
    ) -> Tuple[float, np.ndarray]:
        """
        Error cuadrático medio sobre las entradas con máscara 1 y su gradiente
        respecto del vector plano de parámetros.
        """
        total = float(np.sum(batch.mask))
        if total <= 0.0:
            raise InvalidParamsError("la máscara de pérdida no tiene entradas activas")

        theta = net.theta if theta is None else theta
        out, activations = PolicyService._forward_pass(net, batch.inputs, theta)
        residual = (out - batch.targets) * batch.mask
        loss = float(np.sum(residual * residual) / total)

        grad = np.zeros_like(theta)
        layers = net.layers(theta)
        grad_layers = net.layers(grad)
        delta = 2.0 * residual / total
        for index in reversed(range(len(layers))):
            w, _ = layers[index]
            grad_w, grad_b = grad_layers[index]
            grad_w[...] = activations[index].T @ delta
            grad_b[...] = delta.sum(axis=0)
            if index > 0:
                delta = (delta @ w.T) * _activation_grad(activations[index], net.descriptor.activation)
        return loss, grad

    # --- Entrenamiento ---

    @staticmethod
    def build_batch(
        net: PolicyNet,
        cfg: TrainConfig,
        observations: np.ndarray,
        chunks: np.ndarray,
        rng: np.random.Generator,
    ) -> TrainingBatch:
        """
        Ensambla (entrada, objetivo, máscara) según la familia de entrenamiento.
        Orden de consumo del rng: t, ruido, schedule.
        """
        batch, horizon, _ = chunks.shape
        t = rng.uniform(0.0, 1.0, size=batch)
        eps = rng.standard_normal(chunks.shape)
        ranges = (tuple(cfg.d_range), tuple(cfg.r_range))
        row_mask = np.ones((batch, horizon))

        if cfg.family == StrategyFamily.VANILLA:
            weights = np.zeros((batch, horizon))
            noisy = FlowService.fm_path(eps, chunks, t)
            target = chunks - eps
        elif cfg.family == StrategyFamily.LEGATO:
            weights = ScheduleService.sample_weights(rng, ranges, horizon, batch)
            noisy = FlowService.legato_path(eps, chunks, weights, t)
            target = FlowService.target_velocity(chunks, eps, weights, t, n_steps=cfg.n_steps)
        elif cfg.family == StrategyFamily.RTC_TRAIN:
            # Prefijo duro dado como verdad; la pérdida ignora esas filas
            weights = ScheduleService.sample_weights(rng, ranges, horizon, batch, hard=True)
            noisy = FlowService.legato_path(eps, chunks, weights, t)
            target = chunks - eps
            row_mask = 1.0 - weights
        else:
            weights = ScheduleService.sample_weights(rng, ranges, horizon, batch, hard=True)
            guided_noise = FlowService.mix_noise(eps, chunks, weights)
            noisy = FlowService.fm_path(guided_noise, chunks, t)
            target = chunks - guided_noise

        inputs = PolicyService.build_inputs(net.descriptor, noisy, observations, t, weights)
        mask = np.broadcast_to(row_mask[..., None], chunks.shape).reshape(batch, -1)
        return TrainingBatch(inputs=inputs, targets=target.reshape(batch, -1), mask=np.array(mask))

    @staticmethod
    def training_step(
        net: PolicyNet,
        optimizer: AdamOptimizer,
        observations: np.ndarray,
        chunks: np.ndarray,
        rng: np.random.Generator,
        cfg: TrainConfig,
    ) -> float:
        """Un paso de Adam; devuelve la pérdida media del batch"""
        if chunks.shape[0] == 0:
            raise InvalidParamsError("batch vacío")

        batch = PolicyService.build_batch(net, cfg, observations, chunks, rng)
        loss, grad = PolicyService.loss_and_grad(net, batch)
        if not np.isfinite(loss) or not np.all(np.isfinite(grad)):
            raise DivergenceError(f"pérdida no finita ({loss}) en el paso {optimizer.step_count + 1}")
        optimizer.step(net.theta, grad)
        return loss

    @staticmethod
    def train(
        net: PolicyNet,
        dataset: DatasetArtifact,
        cfg: TrainConfig,
        rng: np.random.Generator,
    ) -> List[float]:
        """Bucle de minibatches; devuelve la curva de pérdida (un valor por paso)"""
        optimizer = AdamOptimizer.from_config(net.descriptor.n_params, cfg)
        batch_size = min(cfg.batch_size, len(dataset))
        curve: List[float] = []

        logger.info(f"🚀 Entrenando {cfg.family.value}: {cfg.steps} pasos, batch {batch_size}")
        for step in range(cfg.steps):
            index = rng.integers(0, len(dataset), size=batch_size)
            loss = PolicyService.training_step(
                net, optimizer, dataset.observations[index], dataset.chunks[index], rng, cfg
            )
            curve.append(loss)
            if (step + 1) % cfg.log_every == 0:
                logger.info(f"   paso {step + 1}/{cfg.steps} loss={loss:.6f}")

        if curve:
            logger.info(f"✅ Entrenamiento {cfg.family.value} terminado (loss final {curve[-1]:.6f})")
        return curve

    # --- Chequeo de gradiente ---

    @staticmethod
    def grad_check(
        net: PolicyNet,
        batch: TrainingBatch,
        h: float = 1e-5,
        n_checks: int = 50,
        rng: Optional[np.random.Generator] = None,
        grad_fn: Optional[GradFn] = None,
    ) -> float:
        """
        Máximo error relativo entre el gradiente analítico (o `grad_fn`)
        y diferencias finitas centrales sobre un subconjunto aleatorio de parámetros.
        """
        if h <= 0.0:
            raise InvalidParamsError(f"h debe ser > 0 (h={h})")

        rng = rng or np.random.default_rng(0)
        theta = net.theta.copy()
        if grad_fn is None:
            analytic = PolicyService.loss_and_grad(net, batch, theta)[1]
        else:
            analytic = grad_fn(theta)

        chosen = rng.choice(theta.size, size=min(n_checks, theta.size), replace=False)
        worst = 0.0
        for index in chosen:
            plus = theta.copy()
            plus[index] += h
            minus = theta.copy()
            minus[index] -= h
            numeric = (PolicyService.loss(net, batch, plus) - PolicyService.loss(net, batch, minus)) / (2.0 * h)
            scale = max(abs(analytic[index]), abs(numeric), 1e-6)
            worst = max(worst, abs(analytic[index] - numeric) / scale)
        return worst

    # --- Checkpoints ---

    @staticmethod
    def to_checkpoint(
        net: PolicyNet,
        task: TaskName,
        cfg: TrainConfig,
        steps_done: int,
        final_loss: Optional[float] = None,
    ) -> CheckpointArtifact:
        return CheckpointArtifact(
            family=net.family,
            task=task,
            descriptor=net.descriptor,
            theta=net.theta.copy(),
            train_config=cfg,
            seed=cfg.seed,
            steps_done=steps_done,
            final_loss=final_loss,
        )

    @staticmethod
    def check_checkpoint(checkpoint: CheckpointArtifact, expected: Optional[ArchitectureDescriptor] = None) -> None:
        """Rechaza checkpoints cuyo vector o descriptor no coinciden"""
        if checkpoint.theta.shape != (checkpoint.descriptor.n_params,):
            raise CheckpointMismatchError(
                f"vector de {checkpoint.theta.size} parámetros, el descriptor pide {checkpoint.descriptor.n_params}"
            )
        if expected is not None and checkpoint.descriptor != expected:
            raise CheckpointMismatchError(
                f"arquitectura del checkpoint distinta de la esperada: {checkpoint.descriptor} vs {expected}"
            )

    @staticmethod
    def check_schedule_match(checkpoint: CheckpointArtifact, n_steps: int, horizon: int) -> None:
        """El N y el H de inferencia deben ser los del entrenamiento (la grilla de kappa depende de N)"""
        trained = checkpoint.train_config.n_steps
        if trained != n_steps:
            raise CheckpointMismatchError(
                f"checkpoint {checkpoint.family.value} entrenado con N={trained}, la ejecución usa N={n_steps}"
            )
        if checkpoint.descriptor.horizon != horizon:
            raise CheckpointMismatchError(
                f"checkpoint {checkpoint.family.value} con H={checkpoint.descriptor.horizon}, la ejecución usa H={horizon}"
            )

    @staticmethod
    def training_dataset_check(dataset: DatasetArtifact, cfg: TrainConfig) -> None:
        """Los rangos de (d, r) deben caber en el horizonte del dataset"""
        for name, (lo, hi) in (("d_range", cfg.d_range), ("r_range", cfg.r_range)):
            if hi > dataset.horizon:
                raise InvalidParamsError(f"{name}=({lo}, {hi}) excede H={dataset.horizon}")
