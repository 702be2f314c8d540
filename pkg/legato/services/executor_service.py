"""
Servicio del simulador de ejecución por chunks con retardo
Línea de tiempo del ciclo c:
- observación en el índice c * s del stream
- a_ref = pad_last(chunk previo, s)
- las primeras d filas del marco siguen saliendo del chunk previo (filas s..s+d-1)
- luego se comprometen las filas d..s-1 del chunk nuevo
El ciclo 0 no tiene chunk previo: referencia en cero y guía desactivada.
"""

import logging
from typing import Callable, List, Optional, Tuple

import numpy as np

from legato.config import settings
from legato.models.enums import STRATEGY_FAMILIES, Strategy, StrategyFamily
from legato.models.policy import PolicyNet
from legato.models.schedule import GuidanceSchedule
from legato.models.task import EnvState
from legato.models.trace import CycleRecord, ExecConfig, ExecutionTrace
from legato.schemas.config_schema import TaskSpecSchema
from legato.services.flow_service import FlowService
from legato.services.policy_service import PolicyService
from legato.services.schedule_service import ScheduleService
from legato.services.task_service import ACTION_DIM, ChunkFn, TaskService
from legato.utils.exceptions import (
    InvalidParamsError,
    NonFiniteActionError,
    ShapeMismatchError,
    StrategyMismatchError,
)

logger = logging.getLogger(__name__)

VelocityFn = Callable[[np.ndarray, float, np.ndarray], np.ndarray]

# Estrategias con guía en cada paso de denoising
PER_STEP_GUIDED = (Strategy.LEGATO, Strategy.RTC_SOFT, Strategy.RTC_TRAIN)


def _delay_of(schedule: GuidanceSchedule) -> int:
    if schedule.params is not None:
        return schedule.params.d
    return int(np.sum(schedule.prefix_mask))


class ExecutorService:

    @staticmethod
    def pad_last(prev: np.ndarray, s: int) -> np.ndarray:
        """prev[s:H] seguido de s copias de la última fila"""
        horizon = prev.shape[0]
        if not 0 <= s <= horizon:
            raise InvalidParamsError(f"s={s} fuera de [0, {horizon}]")
        return np.concatenate([prev[s:], np.repeat(prev[-1:], s, axis=0)], axis=0)

    @staticmethod
    def check_compatibility(strategy: Strategy, family: StrategyFamily) -> None:
        allowed = STRATEGY_FAMILIES[strategy]
        if family not in allowed:
            raise StrategyMismatchError(
                f"la estrategia {strategy.value} requiere un checkpoint "
                f"{' o '.join(f.value for f in allowed)}, se recibió {family.value}"
            )

    @staticmethod
    def guidance_mask(strategy: Strategy, schedule: GuidanceSchedule) -> GuidanceSchedule:
        """Máscara efectiva de cada estrategia para un schedule de ejecución"""
        if strategy in (Strategy.LEGATO, Strategy.RTC_SOFT):
            return schedule
        if strategy in (Strategy.RTC_TRAIN, Strategy.ONESHOT):
            return ScheduleService.hard_prefix_schedule(_delay_of(schedule), schedule.horizon, schedule.n_steps)
        return ScheduleService.zero_schedule(schedule.horizon, schedule.n_steps)

    @staticmethod
    def policy_velocity_fn(net: PolicyNet, observation: np.ndarray) -> VelocityFn:
        def velocity(y: np.ndarray, t: float, condition: np.ndarray) -> np.ndarray:
            return PolicyService.forward(net, y, observation, t, condition)

        return velocity

    @staticmethod
    def generate_chunk(
        net: Optional[PolicyNet],
        observation: np.ndarray,
        a_ref: np.ndarray,
        strategy: Strategy,
        schedule: GuidanceSchedule,
        rng: np.random.Generator,
        velocity_fn: Optional[VelocityFn] = None,
        eps: Optional[np.ndarray] = None,
    ) -> Tuple[np.ndarray, List[float]]:
        """
        Genera un chunk con la estrategia dada.
        Devuelve (chunk, drift), donde drift[k] es la distancia media de las filas
        del prefijo (omega = 1) a la referencia tras el paso k (k = 0 es la inicialización).
        """
        if net is not None:
            ExecutorService.check_compatibility(strategy, net.family)
            velocity_fn = velocity_fn or ExecutorService.policy_velocity_fn(net, observation)
        if velocity_fn is None:
            raise InvalidParamsError("se requiere una red o un campo de velocidad")

        mask = ExecutorService.guidance_mask(strategy, schedule)
        if net is not None and net.family == StrategyFamily.VANILLA:
            condition = np.zeros(mask.horizon)
        else:
            condition = mask.omega

        eps = rng.standard_normal(a_ref.shape) if eps is None else eps
        prefix = schedule.prefix_mask
        drift: List[float] = []

        def record(y: np.ndarray):
            if prefix.any():
                gap = np.linalg.norm(y[prefix] - a_ref[prefix], axis=1)
                drift.append(float(np.mean(gap)))

        if strategy in PER_STEP_GUIDED:
            state = FlowService.initial_state(eps, a_ref, mask)
            record(state.y)
            for _ in range(mask.n_steps):
                velocity = velocity_fn(state.y, state.t, condition)
                state = FlowService.guided_step(state, velocity, a_ref, mask)
                record(state.y)
            chunk = state.y
        else:
            # oneshot: prefijo fijado solo en la inicialización; naive: ruido puro
            y = FlowService.guide(eps, a_ref, mask) if strategy == Strategy.ONESHOT else eps.copy()
            record(y)
            for k in range(mask.n_steps):
                velocity = velocity_fn(y, k / mask.n_steps, condition)
                y = FlowService.euler_step(y, velocity, mask.delta_t)
                record(y)
            chunk = y

        if not np.all(np.isfinite(chunk)):
            raise NonFiniteActionError(f"chunk no finito generado por {strategy.value}")
        return chunk, drift

    @staticmethod
    def run_episode(
        net: Optional[PolicyNet],
        spec: TaskSpecSchema,
        cfg: ExecConfig,
        rng: np.random.Generator,
        chunk_fn: Optional[ChunkFn] = None,
        seed: Optional[int] = None,
    ) -> ExecutionTrace:
        """
        Ejecuta hasta max_cycles ciclos (o hasta llegar a la meta, revisado al final de cada marco).
        Con `chunk_fn` los chunks vienen de un oráculo en lugar de la red.
        """
        schedule = ScheduleService.from_spec(cfg.schedule)
        horizon, s, d = schedule.horizon, cfg.schedule.s, cfg.schedule.d
        if horizon != spec.horizon:
            raise InvalidParamsError(f"H del schedule ({horizon}) != H de la tarea ({spec.horizon})")
        if d > s or s + d > horizon:
            raise InvalidParamsError(f"el retardo d={d} debe cumplir d <= s y s + d <= H (s={s}, H={horizon})")
        if net is not None:
            ExecutorService.check_compatibility(cfg.strategy, net.family)
        elif chunk_fn is None:
            raise InvalidParamsError("se requiere una red o un oráculo de chunks")

        state = TaskService.initial_state(spec, rng)
        start = state.position.copy()
        tolerance = TaskService.goal_tolerance(spec, cfg.goal_tolerance_fraction)
        action_dim = ACTION_DIM
        zero = ScheduleService.zero_schedule(horizon, schedule.n_steps)

        committed: List[np.ndarray] = []
        source: List[int] = []
        cycles: List[CycleRecord] = []
        boundaries: List[int] = []
        prev: Optional[np.ndarray] = None

        for c in range(cfg.max_cycles):
            frame_start = c * s
            observation = TaskService.observe(spec, state)
            if prev is None:
                a_ref, active = np.zeros((horizon, action_dim)), zero
            else:
                a_ref, active = ExecutorService.pad_last(prev, s), schedule

            if chunk_fn is not None:
                chunk, drift = np.asarray(chunk_fn(observation, state), dtype=np.float64), []
            else:
                chunk, drift = ExecutorService.generate_chunk(net, observation, a_ref, cfg.strategy, active, rng)
            if chunk.shape != (horizon, action_dim):
                raise ShapeMismatchError(f"chunk de forma {chunk.shape}, se esperaba {(horizon, action_dim)}")
            if not np.all(np.isfinite(chunk)):
                raise NonFiniteActionError(f"chunk no finito en el ciclo {c}")

            if prev is None:
                delay = 0
                rows = chunk[:s]
            else:
                delay = d
                rows = np.concatenate([prev[s:s + d], chunk[d:s]], axis=0)
                boundaries.append(frame_start + d)

            cycles.append(CycleRecord(
                index=c,
                frame_start=frame_start,
                chunk=chunk,
                reference=None if prev is None else a_ref,
                overlap_rows=0 if prev is None else horizon - s,
                delay_rows=delay,
                mode=TaskService.chunk_mode(spec, state.position, chunk, tolerance),
                simulated_delay=delay,
                guided=prev is not None and cfg.strategy != Strategy.NAIVE,
                drift=drift,
            ))

            state = TaskService.rollout_chunk(state, rows)
            committed.append(rows)
            source.extend([c - 1] * delay + [c] * (s - delay))
            prev = chunk

            if cfg.stop_at_goal and TaskService.first_arrival(
                start, np.concatenate(committed), state.goals, tolerance, state.min_steps
            ) is not None:
                break

        stream = np.concatenate(committed, axis=0)
        arrival = TaskService.first_arrival(start, stream, state.goals, tolerance, state.min_steps)
        logger.debug(f"episodio {cfg.label}: {len(cycles)} ciclos, llegada={arrival}")

        return ExecutionTrace(
            task=spec.name,
            config=cfg,
            seed=seed if seed is not None else (cfg.seed or 0),
            dt=settings.control_dt,
            start_position=start,
            goals=state.goals,
            min_steps=state.min_steps,
            goal_tolerance=tolerance,
            stream=stream,
            source_cycle=source,
            cycles=cycles,
            boundary_indices=boundaries,
            reached_goal=arrival is not None,
        )

    @staticmethod
    def completion_time(
        trace: ExecutionTrace,
        env: Optional[EnvState] = None,
        goal_tolerance: Optional[float] = None,
    ) -> Optional[int]:
        """Primer paso comprometido en que se cumple el predicado de meta; None si nunca"""
        start = trace.start_position if env is None else env.position
        goals = trace.goals if env is None else env.goals
        min_steps = trace.min_steps if env is None else env.min_steps
        tolerance = trace.goal_tolerance if goal_tolerance is None else goal_tolerance
        return TaskService.first_arrival(start, trace.stream, goals, tolerance, min_steps)
