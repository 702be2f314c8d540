"""
Servicio de flow matching y continuación guiada
Caminos, mezcla acción-ruido, velocidades objetivo y la recurrencia guiada.
Todas las operaciones aceptan un GuidanceSchedule o un arreglo de pesos (H o B x H)
y se difunden sobre un eje de batch inicial.
"""

import logging
from typing import Callable, Optional, Union

import numpy as np

from legato.models.chunk import DenoiseState
from legato.models.schedule import GuidanceSchedule
from legato.services.schedule_service import ScheduleService
from legato.utils.exceptions import InvalidParamsError, ShapeMismatchError, StepOverflowError

logger = logging.getLogger(__name__)

Weights = Union[GuidanceSchedule, np.ndarray]
TargetFn = Callable[[np.ndarray, np.ndarray, Weights, float], np.ndarray]


def _check_pair(x: np.ndarray, y: np.ndarray):
    if x.shape != y.shape:
        raise ShapeMismatchError(f"formas distintas: {x.shape} vs {y.shape}")
    if x.ndim < 2:
        raise ShapeMismatchError(f"un chunk debe ser H x Da, forma recibida {x.shape}")


def _weights(omega: Weights, chunk: np.ndarray) -> np.ndarray:
    """Pesos con un eje extra para difundirse sobre Da"""
    w = omega.omega if isinstance(omega, GuidanceSchedule) else np.asarray(omega, dtype=np.float64)
    if w.shape[-1] != chunk.shape[-2]:
        raise ShapeMismatchError(f"largo de omega {w.shape[-1]} != H={chunk.shape[-2]}")
    return w[..., None]


def _kappa(omega: Weights, chunk: np.ndarray, n_steps: Optional[int]) -> np.ndarray:
    if isinstance(omega, GuidanceSchedule):
        if n_steps is not None and n_steps != omega.n_steps:
            raise InvalidParamsError(f"N={n_steps} distinto del N del schedule ({omega.n_steps})")
        return _weights(omega.kappa, chunk)
    if n_steps is None:
        raise InvalidParamsError("se requiere n_steps para pesos sin schedule")
    return _weights(omega, chunk) * n_steps


def _time(t: Union[float, np.ndarray], chunk: np.ndarray) -> Union[float, np.ndarray]:
    """t escalar o un t por elemento del batch"""
    if np.ndim(t) == 0:
        return float(t)
    return np.asarray(t, dtype=np.float64).reshape(-1, *([1] * (chunk.ndim - 1)))


class FlowService:

    @staticmethod
    def fm_path(eps: np.ndarray, a: np.ndarray, t) -> np.ndarray:
        """X_t = (1 - t) eps + t a"""
        _check_pair(eps, a)
        tt = _time(t, a)
        return (1.0 - tt) * eps + tt * a

    @staticmethod
    def mix_noise(eps: np.ndarray, a: np.ndarray, omega: Weights) -> np.ndarray:
        """eps_eff = (1 - omega) eps + omega a, fila por fila"""
        _check_pair(eps, a)
        w = _weights(omega, a)
        return (1.0 - w) * eps + w * a

    @staticmethod
    def legato_path(eps: np.ndarray, a: np.ndarray, omega: Weights, t) -> np.ndarray:
        tt = _time(t, a)
        return (1.0 - tt) * FlowService.mix_noise(eps, a, omega) + tt * a

    @staticmethod
    def target_velocity(
        a: np.ndarray,
        eps: np.ndarray,
        omega: Weights,
        t,
        n_steps: Optional[int] = None,
    ) -> np.ndarray:
        """
        Velocidad objetivo en forma cerrada: (1 - kappa (1 - t)) (a - eps).
        Definida también en omega = 1; la inversa (1 - omega)^-1 nunca se materializa.
        """
        _check_pair(a, eps)
        kappa = _kappa(omega, a, n_steps)
        tt = _time(t, a)
        return (1.0 - kappa * (1.0 - tt)) * (a - eps)

    @staticmethod
    def guide(x: np.ndarray, a_ref: np.ndarray, omega: Weights) -> np.ndarray:
        """(1 - omega) x + omega a_ref; filas con omega = 1 quedan exactamente en a_ref"""
        _check_pair(x, a_ref)
        w = _weights(omega, x)
        return (1.0 - w) * x + w * a_ref

    @staticmethod
    def euler_step(x: np.ndarray, velocity: np.ndarray, delta_t: float) -> np.ndarray:
        _check_pair(x, velocity)
        return x + delta_t * velocity

    @staticmethod
    def guided_step(
        state: DenoiseState,
        velocity: np.ndarray,
        a_ref: np.ndarray,
        omega: GuidanceSchedule,
    ) -> DenoiseState:
        """
        Un paso de la recurrencia guiada: Euler y luego guía.
        La guía es la última operación, así el prefijo queda fijo bit a bit.
        """
        n_steps = omega.n_steps
        if state.k >= n_steps:
            raise StepOverflowError(f"paso k={state.k} fuera de rango para N={n_steps}")

        x_next = FlowService.euler_step(state.y, velocity, omega.delta_t)
        y_next = FlowService.guide(x_next, a_ref, omega)
        k_next = state.k + 1
        return DenoiseState(y=y_next, k=k_next, t=k_next / n_steps)

    @staticmethod
    def initial_state(eps: np.ndarray, a_ref: np.ndarray, omega: GuidanceSchedule) -> DenoiseState:
        """Y_0 = guide(eps, a_ref, omega) en t = 0"""
        return DenoiseState(y=FlowService.guide(eps, a_ref, omega), k=0, t=0.0)

    @staticmethod
    def integrate_exact(
        eps: np.ndarray,
        a: np.ndarray,
        omega: GuidanceSchedule,
        n_steps: Optional[int] = None,
        target_fn: Optional[TargetFn] = None,
    ) -> np.ndarray:
        """
        Integrador oráculo: referencia = verdad, velocidad = objetivo en forma cerrada.
        Devuelve Y_N, que coincide con `a` salvo redondeo.
        """
        if n_steps is not None and n_steps != omega.n_steps:
            omega = ScheduleService.from_omega(omega.omega, n_steps).model_copy(
                update={"params": omega.params}
            )
        target_fn = target_fn or FlowService.target_velocity

        state = FlowService.initial_state(eps, a, omega)
        for _ in range(omega.n_steps):
            velocity = target_fn(a, eps, omega, state.t)
            state = FlowService.guided_step(state, velocity, a, omega)
        return state.y
