"""
Servicio de schedules de guía
Construye, valida, aleatoriza y serializa el vector omega a partir de (d, r, H)
"""

import logging
from typing import List, Sequence, Tuple, Union

import numpy as np

from legato.config import settings
from legato.models.schedule import GuidanceSchedule, ScheduleParams, ScheduleSpec
from legato.utils.exceptions import InvalidParamsError

logger = logging.getLogger(__name__)

IntRange = Tuple[int, int]


class ScheduleService:

    @staticmethod
    def schedule_weights(
        d: Union[int, np.ndarray],
        r: Union[int, np.ndarray],
        horizon: int,
    ) -> np.ndarray:
        """
        Vector(es) omega para (d, r) escalares o arreglos de largo B.
        Prefijo en 1, rampa 1 - (j+1)/(r+1) y cola en 0.
        """
        d_arr = np.asarray(d, dtype=np.int64)[..., None]
        r_arr = np.asarray(r, dtype=np.int64)[..., None]
        index = np.arange(horizon)
        ramp = 1.0 - (index - d_arr + 1) / (r_arr + 1.0)
        omega = np.where(index < d_arr, 1.0, np.where(index < d_arr + r_arr, ramp, 0.0))
        return omega.astype(np.float64)

    @staticmethod
    def build_schedule(params: ScheduleParams, n_steps: int = None) -> GuidanceSchedule:
        """Schedule determinista a partir de parámetros ya validados"""
        n_steps = settings.DENOISE_STEPS if n_steps is None else n_steps
        if n_steps < 1:
            raise InvalidParamsError(f"n_steps debe ser >= 1 (n_steps={n_steps})")

        omega = ScheduleService.schedule_weights(params.d, params.r, params.H)
        return GuidanceSchedule(
            omega=omega,
            kappa=omega * n_steps,
            delta_t=1.0 / n_steps,
            n_steps=n_steps,
            params=params,
        )

    @staticmethod
    def _check_ranges(d_range: IntRange, r_range: IntRange, horizon: int):
        for name, (lo, hi) in (("d", d_range), ("r", r_range)):
            if lo < 0 or hi < lo or hi > horizon:
                raise InvalidParamsError(f"rango de {name} fuera de [0, H]: ({lo}, {hi}), H={horizon}")

    @staticmethod
    def sample_schedule(
        rng: np.random.Generator,
        ranges: Tuple[IntRange, IntRange],
        horizon: int,
        n_steps: int = None,
    ) -> GuidanceSchedule:
        """
        d ~ U{d_range}, r ~ U{r_range}; r se recorta a H - d.
        s se completa como H - d - r (al menos 1) para que los parámetros sean válidos.
        """
        d_range, r_range = ranges
        ScheduleService._check_ranges(d_range, r_range, horizon)

        d = int(rng.integers(d_range[0], d_range[1] + 1))
        r = int(rng.integers(r_range[0], r_range[1] + 1))
        r = min(r, horizon - d)
        s = min(max(horizon - d - r, 1), horizon)

        params = ScheduleParams(d=d, r=r, s=s, H=horizon)
        return ScheduleService.build_schedule(params, n_steps)

    @staticmethod
    def sample_weights(
        rng: np.random.Generator,
        ranges: Tuple[IntRange, IntRange],
        horizon: int,
        batch_size: int,
        hard: bool = False,
    ) -> np.ndarray:
        """
        Versión vectorizada de sample_schedule para el entrenamiento: matriz B x H.
        hard=True fija r = 0 (prefijo duro).
        """
        d_range, r_range = ranges
        ScheduleService._check_ranges(d_range, r_range, horizon)

        d = rng.integers(d_range[0], d_range[1] + 1, size=batch_size)
        if hard:
            r = np.zeros(batch_size, dtype=np.int64)
        else:
            r = rng.integers(r_range[0], r_range[1] + 1, size=batch_size)
        r = np.minimum(r, horizon - d)
        return ScheduleService.schedule_weights(d, r, horizon)

    @staticmethod
    def hard_prefix_schedule(d: int, horizon: int, n_steps: int = None) -> GuidanceSchedule:
        """Máscara binaria m: 1 en las primeras d filas (r = 0)"""
        s = min(max(horizon - d, 1), horizon)
        return ScheduleService.build_schedule(ScheduleParams(d=d, r=0, s=s, H=horizon), n_steps)

    @staticmethod
    def zero_schedule(horizon: int, n_steps: int = None) -> GuidanceSchedule:
        """omega = 0: flow matching estándar"""
        return ScheduleService.build_schedule(ScheduleParams(d=0, r=0, s=horizon, H=horizon), n_steps)

    @staticmethod
    def from_omega(omega: Sequence[float], n_steps: int = None) -> GuidanceSchedule:
        """Schedule con un vector explícito (sin parámetros escalares)"""
        n_steps = settings.DENOISE_STEPS if n_steps is None else n_steps
        if n_steps < 1:
            raise InvalidParamsError(f"n_steps debe ser >= 1 (n_steps={n_steps})")
        weights = np.array(omega, dtype=np.float64)
        return GuidanceSchedule(
            omega=weights,
            kappa=weights * n_steps,
            delta_t=1.0 / n_steps,
            n_steps=n_steps,
        )

    @staticmethod
    def from_spec(spec: ScheduleSpec) -> GuidanceSchedule:
        """
        Schedule desde el archivo de configuración.
        Un omega explícito reemplaza a (d, r), pero (d, r, s, H) se siguen validando.
        """
        params = spec.to_params()
        if spec.omega is None:
            return ScheduleService.build_schedule(params, spec.n_steps)

        if len(spec.omega) != spec.H:
            raise InvalidParamsError(f"omega explícito de largo {len(spec.omega)} != H={spec.H}")
        explicit = ScheduleService.from_omega(spec.omega, spec.n_steps)
        return explicit.model_copy(update={"params": params})

    @staticmethod
    def to_spec(schedule: GuidanceSchedule, s: int = None) -> ScheduleSpec:
        """Serializa un schedule; sin parámetros escalares se guarda el vector completo"""
        params = schedule.params
        if params is None:
            return ScheduleSpec(
                d=int(np.sum(schedule.omega == 1.0)),
                r=0,
                s=schedule.horizon if s is None else s,
                H=schedule.horizon,
                n_steps=schedule.n_steps,
                omega=[float(w) for w in schedule.omega],
            )

        # El vector guardado se reconstruye desde (d, r) si no fue explícito
        rebuilt = ScheduleService.schedule_weights(params.d, params.r, params.H)
        explicit = None if np.array_equal(rebuilt, schedule.omega) else [float(w) for w in schedule.omega]
        return ScheduleSpec(
            d=params.d,
            r=params.r,
            s=params.s if s is None else s,
            H=params.H,
            n_steps=schedule.n_steps,
            omega=explicit,
            rtc_constraint=params.rtc_constraint,
        )

    @staticmethod
    def rtc_grid(d: int, strides: Sequence[int], horizon: int, n_steps: int = None) -> List[ScheduleSpec]:
        """Ablación de stride: d fijo, r = H - s - d para cada s"""
        n_steps = settings.DENOISE_STEPS if n_steps is None else n_steps
        specs = []
        for s in strides:
            r = horizon - s - d
            if r < 0:
                raise InvalidParamsError(f"s={s} y d={d} no caben en H={horizon}")
            spec = ScheduleSpec(d=d, r=r, s=s, H=horizon, n_steps=n_steps, rtc_constraint=True)
            spec.to_params()
            specs.append(spec)
        return specs

    @staticmethod
    def delay_grid(delays: Sequence[int], s: int, horizon: int, n_steps: int = None) -> List[ScheduleSpec]:
        """Ablación de retardo: s fijo, r = H - s - d para cada d"""
        n_steps = settings.DENOISE_STEPS if n_steps is None else n_steps
        specs = []
        for d in delays:
            r = horizon - s - d
            if r < 0:
                raise InvalidParamsError(f"d={d} y s={s} no caben en H={horizon}")
            spec = ScheduleSpec(d=d, r=r, s=s, H=horizon, n_steps=n_steps, rtc_constraint=True)
            spec.to_params()
            specs.append(spec)
        return specs
