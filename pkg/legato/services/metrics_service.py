"""
Servicio de métricas de suavidad y calidad de ejecución
NSPARC y NLDLJ se calculan por bloque de movimiento y se promedian.
Valores más bajos = más suave.
"""

import logging
from typing import Iterable, Optional, Sequence, Tuple, Union

import numpy as np

from legato.config import settings
from legato.models.enums import CutoffRule
from legato.models.metric import CommandStream, MetricReport, MotionBlock
from legato.models.trace import ExecutionTrace
from legato.services.executor_service import ExecutorService
from legato.utils.exceptions import UndefinedMetricError

logger = logging.getLogger(__name__)

Segment = Tuple[np.ndarray, np.ndarray]


class MetricsService:

    @staticmethod
    def block_velocity(stream: CommandStream, block: MotionBlock) -> np.ndarray:
        """Velocidad (T, k) de un bloque; los bloques rotacionales se desenvuelven si son posiciones"""
        data = stream.samples[:, block.columns]
        if stream.kind == "displacement":
            return data / stream.dt
        if block.rotational:
            data = np.unwrap(data, axis=0)
        return np.gradient(data, stream.dt, axis=0)

    @staticmethod
    def speed_profile(stream: CommandStream, block: MotionBlock) -> np.ndarray:
        return np.linalg.norm(MetricsService.block_velocity(stream, block), axis=1)

    @staticmethod
    def spectral_arc_length(
        speed: np.ndarray,
        fs: float,
        threshold: float,
        max_cutoff_hz: float,
        pad_level: int,
        rule: CutoffRule = CutoffRule.FIRST_BELOW,
    ) -> float:
        """Longitud de arco (positiva) del espectro de magnitud normalizado por DC"""
        nfft = int(2 ** (np.ceil(np.log2(len(speed))) + pad_level))
        freqs = np.arange(nfft) * fs / nfft
        magnitude = np.abs(np.fft.fft(speed, nfft))
        if magnitude[0] <= np.finfo(float).tiny:
            raise UndefinedMetricError("perfil de velocidad sin componente DC")
        magnitude = magnitude / magnitude[0]

        keep = freqs <= min(max_cutoff_hz, fs / 2.0)
        f_sel, m_sel = freqs[keep], magnitude[keep]
        if len(f_sel) < 2:
            raise UndefinedMetricError(f"la banda hasta {max_cutoff_hz} Hz solo contiene la componente DC")

        if rule == CutoffRule.LAST_ABOVE:
            above = np.nonzero(m_sel >= threshold)[0]
            stop = above[-1] + 1
        else:
            # el arco cierra en la primera frecuencia bajo el umbral, incluida
            below = np.nonzero(m_sel < threshold)[0]
            stop = below[0] + 1 if below.size else len(m_sel)
        stop = min(max(stop, 2), len(m_sel))
        f_sel, m_sel = f_sel[:stop], m_sel[:stop]

        return float(np.sum(np.sqrt((np.diff(f_sel) / f_sel[-1]) ** 2 + np.diff(m_sel) ** 2)))

    @staticmethod
    def nsparc(
        stream: CommandStream,
        threshold: float = None,
        max_cutoff_hz: float = None,
        pad_level: int = None,
        rule: CutoffRule = CutoffRule.FIRST_BELOW,
    ) -> float:
        """SPARC negado, promediado sobre los bloques de movimiento"""
        if stream.length < 8:
            raise UndefinedMetricError(f"NSPARC requiere T >= 8 (T={stream.length})")
        threshold = settings.SPARC_THRESHOLD if threshold is None else threshold
        max_cutoff_hz = settings.SPARC_MAX_CUTOFF_HZ if max_cutoff_hz is None else max_cutoff_hz
        pad_level = settings.SPARC_PAD_LEVEL if pad_level is None else pad_level

        values = [
            MetricsService.spectral_arc_length(
                MetricsService.speed_profile(stream, block),
                1.0 / stream.dt,
                threshold,
                max_cutoff_hz,
                pad_level,
                rule,
            )
            for block in stream.motion_blocks
        ]
        return float(np.mean(values))

    @staticmethod
    def excluded_jerk_indices(boundary_indices: Iterable[int], length: int) -> np.ndarray:
        """Máscara de muestras válidas: se excluyen b-2 .. b+1 alrededor de cada conexión"""
        valid = np.ones(length, dtype=bool)
        for b in boundary_indices:
            valid[max(b - 2, 0):min(b + 2, length)] = False
        return valid

    @staticmethod
    def nldlj(stream: CommandStream, boundary_indices: Sequence[int] = ()) -> float:
        """
        log(T^5 / v_peak^2 * integral |j|^2 dt), promediado sobre bloques.
        Jerk = segunda derivada numérica de la velocidad.
        """
        if stream.length < 4:
            raise UndefinedMetricError(f"NLDLJ requiere T >= 4 (T={stream.length})")

        valid = MetricsService.excluded_jerk_indices(boundary_indices, stream.length)
        if not valid.any():
            raise UndefinedMetricError("todas las muestras de jerk quedaron excluidas")
        duration = stream.length * stream.dt

        values = []
        for block in stream.motion_blocks:
            velocity = MetricsService.block_velocity(stream, block)
            v_peak = float(np.max(np.linalg.norm(velocity, axis=1)))
            if v_peak <= 0.0:
                raise UndefinedMetricError("velocidad pico nula")
            acceleration = np.gradient(velocity, stream.dt, axis=0)
            jerk = np.gradient(acceleration, stream.dt, axis=0)
            integral = float(np.sum(jerk[valid] ** 2) * stream.dt)
            if integral <= 0.0:
                raise UndefinedMetricError("jerk nulo: NLDLJ no definido")
            values.append(np.log(duration ** 5 / v_peak ** 2 * integral))
        return float(np.mean(values))

    @staticmethod
    def segment_rmse(prev: np.ndarray, new: np.ndarray) -> float:
        """sqrt( (1/O) sum_i ||prev_i - new_i||^2 )"""
        diff = np.asarray(prev) - np.asarray(new)
        return float(np.sqrt(np.mean(np.sum(diff * diff, axis=1))))

    @staticmethod
    def overlap_rmse(segments: Sequence[Segment]) -> Optional[float]:
        """Media sobre fronteras del RMSE de solapamiento; None si no hay solapamiento"""
        values = [MetricsService.segment_rmse(prev, new) for prev, new in segments if len(prev) > 0]
        if not values:
            return None
        return float(np.mean(values))

    @staticmethod
    def mode_switches(labels: Union[ExecutionTrace, Sequence[int]]) -> int:
        if isinstance(labels, ExecutionTrace):
            labels = labels.mode_labels
        labels = list(labels)
        return int(sum(a != b for a, b in zip(labels[:-1], labels[1:])))

    @staticmethod
    def stream_of(trace: ExecutionTrace) -> CommandStream:
        return CommandStream(samples=trace.stream, dt=trace.dt, kind="displacement")

    @staticmethod
    def compute_report(
        trace: ExecutionTrace,
        rule: CutoffRule = CutoffRule.FIRST_BELOW,
    ) -> MetricReport:
        """Reporte completo de una traza"""
        stream = MetricsService.stream_of(trace)
        return MetricReport(
            task=trace.task,
            config=trace.config,
            seed=trace.seed,
            nsparc=MetricsService.nsparc(stream, rule=rule),
            nldlj=MetricsService.nldlj(stream, trace.boundary_indices),
            overlap_rmse=MetricsService.overlap_rmse(trace.overlap_segments()),
            delay_overlap_rmse=MetricsService.overlap_rmse(trace.overlap_segments(delay_only=True)),
            mode_switches=MetricsService.mode_switches(trace),
            completion_steps=ExecutorService.completion_time(trace),
            cycles=len(trace.cycles),
        )
