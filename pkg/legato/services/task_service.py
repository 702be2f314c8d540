"""
Servicio de tareas sintéticas
Alcance bimodal (dos metas simétricas) y vertido oscilante (perfil senoidal periódico).
Las acciones son desplazamientos 2D por paso.
"""

import logging
import math
from typing import Callable, Optional

import numpy as np

from legato.models.enums import TaskName
from legato.models.task import DatasetArtifact, EnvState
from legato.schemas.config_schema import TaskSpecSchema
from legato.utils.exceptions import InvalidParamsError, NonFiniteActionError, ShapeMismatchError

logger = logging.getLogger(__name__)

ACTION_DIM = 2
ChunkFn = Callable[[np.ndarray, EnvState], np.ndarray]


def _min_jerk(tau: np.ndarray) -> np.ndarray:
    """Perfil de mínimo jerk 10 tau^3 - 15 tau^4 + 6 tau^5, saturado en 1"""
    tau = np.clip(tau, 0.0, 1.0)
    return tau ** 3 * (10.0 - 15.0 * tau + 6.0 * tau * tau)


class TaskService:

    # --- Geometría ---

    @staticmethod
    def obs_dim(task: TaskName) -> int:
        return 2 if task == TaskName.BIMODAL_REACH else 4

    @staticmethod
    def goals(spec: TaskSpecSchema, start: Optional[np.ndarray] = None) -> np.ndarray:
        """Metas (G, 2). El vertido termina donde empezó"""
        if spec.name == TaskName.BIMODAL_REACH:
            return np.array([[-spec.goal_x, spec.goal_y], [spec.goal_x, spec.goal_y]])
        origin = np.zeros(2) if start is None else np.asarray(start, dtype=np.float64)
        return origin[None, :].copy()

    @staticmethod
    def reach_steps(spec: TaskSpecSchema) -> int:
        return int(math.ceil(spec.reach_fraction * spec.horizon))

    @staticmethod
    def goal_tolerance(spec: TaskSpecSchema, fraction: float) -> float:
        """Fracción de la distancia nominal a la meta (o de la amplitud de avance)"""
        if spec.name == TaskName.BIMODAL_REACH:
            return fraction * float(np.min(np.linalg.norm(TaskService.goals(spec), axis=1)))
        return fraction * abs(spec.reach_amplitude)

    @staticmethod
    def initial_state(spec: TaskSpecSchema, rng: Optional[np.random.Generator] = None) -> EnvState:
        """Estado inicial en el origen, con jitter de escala noise_scale si se pasa un rng"""
        start = np.zeros(2)
        if rng is not None and spec.noise_scale > 0.0:
            start = spec.noise_scale * rng.standard_normal(2)
        min_steps = spec.period if spec.name == TaskName.OSCILLATING_POUR else 0
        return EnvState(position=start, goals=TaskService.goals(spec, start), time=0, min_steps=min_steps)

    @staticmethod
    def observe(spec: TaskSpecSchema, state: EnvState) -> np.ndarray:
        """Alcance: posición. Vertido: posición + (cos, sin) de la fase"""
        if spec.name == TaskName.BIMODAL_REACH:
            return state.position.copy()
        phase = 2.0 * np.pi * state.time / spec.period
        return np.concatenate([state.position, [np.cos(phase), np.sin(phase)]])

    @staticmethod
    def rollout_env(state: EnvState, action: np.ndarray) -> EnvState:
        """posición += acción; tiempo += 1"""
        action = np.asarray(action, dtype=np.float64)
        if not np.all(np.isfinite(action)):
            raise NonFiniteActionError(f"acción no finita en t={state.time}: {action}")
        return state.model_copy(update={"position": state.position + action, "time": state.time + 1})

    @staticmethod
    def rollout_chunk(state: EnvState, chunk: np.ndarray) -> EnvState:
        for action in chunk:
            state = TaskService.rollout_env(state, action)
        return state

    @staticmethod
    def mode_of(spec: TaskSpecSchema, position: np.ndarray) -> int:
        """Etiqueta de modo: lado de la meta alcanzada (signo de x); el vertido tiene un solo modo"""
        if spec.name == TaskName.BIMODAL_REACH:
            return int(position[0] >= 0.0)
        return 0

    @staticmethod
    def chunk_mode(spec: TaskSpecSchema, position: np.ndarray, chunk: np.ndarray, tolerance: float) -> int:
        """
        Modo de un chunk generado: signo de su desplazamiento total en x.
        Si el chunk casi no se mueve en x (|suma| <= tolerance) decide el lado de la posición alcanzada.
        """
        if spec.name != TaskName.BIMODAL_REACH:
            return 0
        shift = float(np.sum(chunk[:, 0]))
        if abs(shift) <= tolerance:
            return TaskService.mode_of(spec, position + np.sum(chunk, axis=0))
        return int(shift > 0.0)

    # --- Experto ---

    @staticmethod
    def _reach_positions(spec: TaskSpecSchema, start: np.ndarray, goal: np.ndarray, length: int) -> np.ndarray:
        """Posiciones k = 0..length (length + 1 filas) de un alcance de mínimo jerk"""
        steps = np.arange(length + 1)
        profile = _min_jerk(steps / TaskService.reach_steps(spec))
        return start[..., None, :] + (goal - start)[..., None, :] * profile[:, None]

    @staticmethod
    def _pour_positions(spec: TaskSpecSchema, start: np.ndarray, steps: np.ndarray,
                        reach: float, tilt: float) -> np.ndarray:
        phase = 2.0 * np.pi * steps / spec.period
        offsets = np.stack([reach * (1.0 - np.cos(phase)) / 2.0, tilt * np.sin(phase)], axis=-1)
        return start + offsets

    @staticmethod
    def expert_trajectory(
        spec: TaskSpecSchema,
        length: int,
        goal_index: int = 1,
        start: Optional[np.ndarray] = None,
    ) -> np.ndarray:
        """Stream experto sin ruido de `length` desplazamientos desde `start`"""
        start = np.zeros(2) if start is None else np.asarray(start, dtype=np.float64)
        if spec.name == TaskName.BIMODAL_REACH:
            goal = TaskService.goals(spec)[goal_index]
            positions = TaskService._reach_positions(spec, start, goal, length)
        else:
            positions = TaskService._pour_positions(
                spec, start, np.arange(length + 1), spec.reach_amplitude, spec.tilt_amplitude
            )
        return np.diff(positions, axis=0)

    @staticmethod
    def expert_chunk_fn(
        spec: TaskSpecSchema,
        start: np.ndarray,
        goal_index: int = 1,
        max_steps: int = 1000,
    ) -> ChunkFn:
        """El experto como política de chunks: filas [t, t + H) de su trayectoria"""
        stream = TaskService.expert_trajectory(spec, max_steps + spec.horizon, goal_index, start)

        def chunk_fn(observation: np.ndarray, state: EnvState) -> np.ndarray:
            return stream[state.time:state.time + spec.horizon].copy()

        return chunk_fn

    @staticmethod
    def first_arrival(
        start: np.ndarray,
        stream: np.ndarray,
        goals: np.ndarray,
        tolerance: float,
        min_steps: int = 0,
    ) -> Optional[int]:
        """
        Primer índice k (posición tras k pasos; k = 0 es el estado inicial)
        a distancia <= tolerance de alguna meta, con k >= min_steps.
        """
        positions = np.vstack([start[None, :], start[None, :] + np.cumsum(stream, axis=0)])
        distances = np.min(np.linalg.norm(positions[:, None, :] - goals[None, :, :], axis=2), axis=1)
        hits = np.nonzero((distances <= tolerance) & (np.arange(len(positions)) >= min_steps))[0]
        return int(hits[0]) if hits.size else None

    @staticmethod
    def expert_arrival_step(spec: TaskSpecSchema, goal_index: int, tolerance: float) -> Optional[int]:
        """Paso de llegada conocido del experto sin ruido desde el origen"""
        state = TaskService.initial_state(spec)
        length = max(TaskService.reach_steps(spec), spec.period) + spec.horizon
        stream = TaskService.expert_trajectory(spec, length, goal_index)
        return TaskService.first_arrival(state.position, stream, state.goals, tolerance, state.min_steps)

    # --- Chunking de streams ---

    @staticmethod
    def chunk_stream(stream: np.ndarray, horizon: int) -> np.ndarray:
        """(T, Da) -> (T / H, H, Da); T debe ser múltiplo de H"""
        if stream.shape[0] % horizon != 0:
            raise ShapeMismatchError(f"largo {stream.shape[0]} no es múltiplo de H={horizon}")
        return stream.reshape(-1, horizon, stream.shape[-1]).copy()

    @staticmethod
    def concat_chunks(chunks: np.ndarray) -> np.ndarray:
        return np.asarray(chunks).reshape(-1, np.asarray(chunks).shape[-1]).copy()

    # --- Datasets ---

    @staticmethod
    def gen_bimodal_reach(
        rng: np.random.Generator,
        n_demos: int,
        horizon: int,
        noise_scale: float,
        spec: Optional[TaskSpecSchema] = None,
    ) -> DatasetArtifact:
        """
        Ventanas de H pasos sobre alcances de mínimo jerk hacia una de dos metas.
        Cada chunk integra exactamente meta - posición en el inicio de la ventana.
        """
        if n_demos <= 0:
            raise InvalidParamsError(f"n_demos debe ser > 0 (n_demos={n_demos})")
        spec = (spec or TaskSpecSchema(name=TaskName.BIMODAL_REACH)).model_copy(
            update={"horizon": horizon, "noise_scale": noise_scale, "n_demos": n_demos}
        )

        modes = rng.integers(0, 2, size=n_demos)
        starts = noise_scale * rng.standard_normal((n_demos, 2))
        reach_steps = TaskService.reach_steps(spec)
        offsets = rng.integers(0, reach_steps + 1, size=n_demos)

        goals = TaskService.goals(spec)[modes]
        positions = TaskService._reach_positions(spec, starts, goals, reach_steps + horizon)
        window = offsets[:, None] + np.arange(horizon + 1)[None, :]
        visited = positions[np.arange(n_demos)[:, None], window]

        return DatasetArtifact(
            task=TaskName.BIMODAL_REACH,
            horizon=horizon,
            action_dim=ACTION_DIM,
            obs_dim=TaskService.obs_dim(TaskName.BIMODAL_REACH),
            n_demos=n_demos,
            seed=spec.seed,
            generator_params=spec.model_dump(mode="json"),
            observations=visited[:, 0, :].copy(),
            chunks=np.diff(visited, axis=1),
            modes=[int(m) for m in modes],
            start_positions=visited[:, 0, :].copy(),
        )

    @staticmethod
    def gen_oscillating_pour(
        rng: np.random.Generator,
        n_demos: int,
        horizon: int,
        period: int,
        noise_scale: float = 0.0,
        spec: Optional[TaskSpecSchema] = None,
    ) -> DatasetArtifact:
        """Ventanas sobre el perfil avance-inclinación-regreso, con jitter de amplitud"""
        if n_demos <= 0:
            raise InvalidParamsError(f"n_demos debe ser > 0 (n_demos={n_demos})")
        if period <= 0:
            raise InvalidParamsError(f"period debe ser > 0 (period={period})")
        spec = (spec or TaskSpecSchema(name=TaskName.OSCILLATING_POUR)).model_copy(
            update={"horizon": horizon, "period": period, "noise_scale": noise_scale, "n_demos": n_demos}
        )

        jitter = 1.0 + noise_scale * rng.standard_normal((n_demos, 2))
        offsets = rng.integers(0, period, size=n_demos)

        steps = offsets[:, None] + np.arange(horizon + 1)[None, :]
        phase = 2.0 * np.pi * steps / period
        reach = spec.reach_amplitude * jitter[:, :1]
        tilt = spec.tilt_amplitude * jitter[:, 1:]
        visited = np.stack([reach * (1.0 - np.cos(phase)) / 2.0, tilt * np.sin(phase)], axis=-1)

        start_phase = 2.0 * np.pi * offsets / period
        observations = np.column_stack([visited[:, 0, :], np.cos(start_phase), np.sin(start_phase)])

        return DatasetArtifact(
            task=TaskName.OSCILLATING_POUR,
            horizon=horizon,
            action_dim=ACTION_DIM,
            obs_dim=TaskService.obs_dim(TaskName.OSCILLATING_POUR),
            n_demos=n_demos,
            seed=spec.seed,
            generator_params=spec.model_dump(mode="json"),
            observations=observations,
            chunks=np.diff(visited, axis=1),
            modes=[0] * n_demos,
            start_positions=visited[:, 0, :].copy(),
        )

    @staticmethod
    def generate_dataset(spec: TaskSpecSchema, rng: np.random.Generator) -> DatasetArtifact:
        logger.info(f"🧪 Generando dataset {spec.name.value}: {spec.n_demos} demos, H={spec.horizon}")
        if spec.name == TaskName.BIMODAL_REACH:
            return TaskService.gen_bimodal_reach(rng, spec.n_demos, spec.horizon, spec.noise_scale, spec)
        return TaskService.gen_oscillating_pour(
            rng, spec.n_demos, spec.horizon, spec.period, spec.noise_scale, spec
        )
