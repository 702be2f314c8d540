"""
Servicio del oráculo analítico (sin modelo aprendido)
Consistencia del camino, reducciones a flow matching estándar, equivalencia de la
recurrencia, exactitud del prefijo y chequeo de gradiente de la red.
"""

import logging
from typing import List, Optional

import numpy as np

from legato.models.chunk import DenoiseState
from legato.models.enums import Activation, StrategyFamily
from legato.models.oracle import CheckResult
from legato.models.policy import ArchitectureDescriptor, TrainConfig, TrainingBatch
from legato.models.schedule import GuidanceSchedule, ScheduleParams
from legato.services.flow_service import FlowService, TargetFn
from legato.services.policy_service import PolicyService
from legato.services.schedule_service import ScheduleService

logger = logging.getLogger(__name__)

CONSISTENCY_TOL = 1e-10
MACHINE_TOL = 1e-12
GRAD_TOL = 1e-4


def _random_chunks(rng: np.random.Generator, horizon: int, action_dim: int):
    eps = rng.standard_normal((horizon, action_dim))
    a = rng.uniform(-2.0, 2.0, size=(horizon, action_dim))
    return eps, a


class OracleService:

    @staticmethod
    def random_schedule(rng: np.random.Generator, horizon: int, n_steps: int) -> GuidanceSchedule:
        """Mitad schedules (d, r) y mitad vectores explícitos no crecientes con extremos exactos"""
        if rng.random() < 0.5:
            d = int(rng.integers(0, horizon + 1))
            r = int(rng.integers(0, horizon - d + 1))
            s = min(max(horizon - d - r, 1), horizon)
            return ScheduleService.build_schedule(ScheduleParams(d=d, r=r, s=s, H=horizon), n_steps)

        omega = np.sort(rng.uniform(0.0, 1.0, size=horizon))[::-1]
        ones, zeros = rng.integers(0, horizon + 1, size=2)
        omega[:ones] = 1.0
        omega[horizon - zeros:] = 0.0
        return ScheduleService.from_omega(omega, n_steps)

    @staticmethod
    def check_path_consistency(
        rng: np.random.Generator,
        cases: int = 1000,
        max_steps: int = 20,
        max_horizon: int = 60,
        max_action_dim: int = 14,
        target_fn: Optional[TargetFn] = None,
    ) -> CheckResult:
        """Integración guiada del objetivo en forma cerrada devuelve A; N recorre 1..max_steps"""
        worst = 0.0
        for case in range(cases):
            n_steps = 1 + case % max_steps
            horizon = int(rng.integers(1, max_horizon + 1))
            action_dim = int(rng.integers(1, max_action_dim + 1))
            eps, a = _random_chunks(rng, horizon, action_dim)
            schedule = OracleService.random_schedule(rng, horizon, n_steps)

            result = FlowService.integrate_exact(eps, a, schedule, target_fn=target_fn)
            worst = max(worst, float(np.max(np.abs(result - a)) / (1.0 + np.max(np.abs(a)))))

        return CheckResult(
            name="path_consistency", passed=worst <= CONSISTENCY_TOL,
            value=worst, threshold=CONSISTENCY_TOL, cases=cases,
        )

    @staticmethod
    def check_reductions(rng: np.random.Generator, cases: int = 100) -> CheckResult:
        """omega = 0 es flow matching estándar (camino, objetivo, batch de entrenamiento); omega = 1 colapsa en A"""
        worst = 0.0
        for _ in range(cases):
            horizon = int(rng.integers(1, 61))
            n_steps = int(rng.integers(1, 21))
            eps, a = _random_chunks(rng, horizon, int(rng.integers(1, 15)))
            t = float(rng.uniform())
            zero = ScheduleService.zero_schedule(horizon, n_steps)
            full = ScheduleService.from_omega(np.ones(horizon), n_steps)
            scale = 1.0 + np.max(np.abs(a)) + np.max(np.abs(eps))

            worst = max(
                worst,
                float(np.max(np.abs(FlowService.legato_path(eps, a, zero, t) - FlowService.fm_path(eps, a, t)))) / scale,
                float(np.max(np.abs(FlowService.target_velocity(a, eps, zero, t) - (a - eps)))) / scale,
                float(np.max(np.abs(FlowService.legato_path(eps, a, full, t) - a))) / scale,
            )

        worst = max(worst, OracleService._training_reduction_gap(rng))
        return CheckResult(
            name="reductions", passed=worst <= MACHINE_TOL,
            value=worst, threshold=MACHINE_TOL, cases=cases,
        )

    @staticmethod
    def _training_reduction_gap(rng: np.random.Generator) -> float:
        """Un batch legato con (d, r) = (0, 0) coincide con el batch vanilla de la misma semilla"""
        descriptor = ArchitectureDescriptor(horizon=6, action_dim=2, obs_dim=2, hidden_sizes=[8])
        net = PolicyService.init_net(descriptor, rng)
        observations = rng.standard_normal((16, 2))
        chunks = rng.standard_normal((16, 6, 2))
        seed = int(rng.integers(0, 2 ** 31))

        legato = TrainConfig(family=StrategyFamily.LEGATO, d_range=(0, 0), r_range=(0, 0), n_steps=5)
        vanilla = TrainConfig(family=StrategyFamily.VANILLA, n_steps=5)
        a = PolicyService.build_batch(net, legato, observations, chunks, np.random.default_rng(seed))
        b = PolicyService.build_batch(net, vanilla, observations, chunks, np.random.default_rng(seed))
        return float(max(np.max(np.abs(a.targets - b.targets)), np.max(np.abs(a.inputs - b.inputs))))

    @staticmethod
    def check_recurrence(rng: np.random.Generator, cases: int = 200) -> CheckResult:
        """guided_step = omega A + (1 - omega) Y_k + (1 - omega) dt f"""
        worst = 0.0
        for _ in range(cases):
            horizon = int(rng.integers(1, 61))
            n_steps = int(rng.integers(1, 21))
            y, a_ref = _random_chunks(rng, horizon, int(rng.integers(1, 15)))
            velocity = rng.standard_normal(y.shape)
            schedule = OracleService.random_schedule(rng, horizon, n_steps)
            k = int(rng.integers(0, n_steps))

            state = FlowService.guided_step(DenoiseState(y=y, k=k, t=k / n_steps), velocity, a_ref, schedule)
            w = schedule.omega[:, None]
            expected = w * a_ref + (1.0 - w) * y + (1.0 - w) * schedule.delta_t * velocity
            scale = 1.0 + np.max(np.abs(expected))
            worst = max(worst, float(np.max(np.abs(state.y - expected))) / scale)

        return CheckResult(
            name="recurrence", passed=worst <= MACHINE_TOL,
            value=worst, threshold=MACHINE_TOL, cases=cases,
        )

    @staticmethod
    def check_prefix_exactness(rng: np.random.Generator, cases: int = 200) -> CheckResult:
        """Tras cada paso guiado las filas con omega = 1 son a_ref bit a bit"""
        worst = 0.0
        for _ in range(cases):
            horizon = int(rng.integers(1, 61))
            n_steps = int(rng.integers(1, 21))
            eps, a_ref = _random_chunks(rng, horizon, int(rng.integers(1, 15)))
            schedule = OracleService.random_schedule(rng, horizon, n_steps)
            prefix = schedule.prefix_mask

            state = FlowService.initial_state(eps, a_ref, schedule)
            for _ in range(n_steps):
                state = FlowService.guided_step(state, 10.0 * rng.standard_normal(eps.shape), a_ref, schedule)
                if prefix.any():
                    worst = max(worst, float(np.max(np.abs(state.y[prefix] - a_ref[prefix]))))

        return CheckResult(
            name="prefix_exactness", passed=worst == 0.0,
            value=worst, threshold=0.0, cases=cases,
        )

    @staticmethod
    def check_direction(rng: np.random.Generator, cases: int = 100) -> CheckResult:
        """Cada fila del objetivo es múltiplo escalar de (a - eps)"""
        worst = 0.0
        for _ in range(cases):
            horizon = int(rng.integers(1, 61))
            n_steps = int(rng.integers(1, 21))
            eps, a = _random_chunks(rng, horizon, int(rng.integers(1, 15)))
            schedule = OracleService.random_schedule(rng, horizon, n_steps)
            t = float(rng.uniform())

            target = FlowService.target_velocity(a, eps, schedule, t)
            factor = (1.0 - schedule.kappa * (1.0 - t))[:, None]
            scale = 1.0 + np.max(np.abs(factor * (a - eps)))
            worst = max(worst, float(np.max(np.abs(target - factor * (a - eps)))) / scale)

        return CheckResult(
            name="direction", passed=worst <= MACHINE_TOL,
            value=worst, threshold=MACHINE_TOL, cases=cases,
        )

    @staticmethod
    def grad_check_batch(rng: np.random.Generator, descriptor: ArchitectureDescriptor, size: int = 10) -> TrainingBatch:
        return TrainingBatch(
            inputs=rng.standard_normal((size, descriptor.input_dim)),
            targets=rng.standard_normal((size, descriptor.output_dim)),
            mask=np.ones((size, descriptor.output_dim)),
        )

    @staticmethod
    def check_gradients(
        rng: np.random.Generator,
        activation: Activation = Activation.TANH,
        n_checks: int = 50,
        h: float = 1e-5,
    ) -> CheckResult:
        """Backprop contra diferencias finitas centrales: 50 parámetros x 10 entradas"""
        descriptor = ArchitectureDescriptor(
            horizon=6, action_dim=2, obs_dim=2, hidden_sizes=[32, 32],
            activation=activation, time_embedding_dim=2,
        )
        net = PolicyService.init_net(descriptor, rng)
        batch = OracleService.grad_check_batch(rng, descriptor)
        error = PolicyService.grad_check(net, batch, h=h, n_checks=n_checks, rng=rng)

        return CheckResult(
            name=f"grad_check_{activation.value}", passed=error < GRAD_TOL,
            value=error, threshold=GRAD_TOL, cases=n_checks,
        )

    @staticmethod
    def run_all(seed: int = 0, cases: int = 1000) -> List[CheckResult]:
        rng = np.random.default_rng(seed)
        results = [
            OracleService.check_path_consistency(rng, cases=cases),
            OracleService.check_reductions(rng, cases=max(cases // 10, 1)),
            OracleService.check_recurrence(rng, cases=max(cases // 5, 1)),
            OracleService.check_prefix_exactness(rng, cases=max(cases // 5, 1)),
            OracleService.check_direction(rng, cases=max(cases // 10, 1)),
            OracleService.check_gradients(rng, Activation.IDENTITY),
            OracleService.check_gradients(rng, Activation.TANH),
        ]
        for result in results:
            log = logger.info if result.passed else logger.error
            log(str(result))
        return results
