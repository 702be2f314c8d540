"""
Modelo de la traza de ejecución emitida por el simulador
"""

from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from legato.config import settings
from .base import BaseArtifact, PackedArray
from .enums import ArtifactKind, Strategy, TaskName
from .schedule import ScheduleSpec


class ExecConfig(BaseModel):
    """Una celda de ejecución: estrategia + schedule (la semilla se completa por grilla)"""
    strategy: Strategy
    schedule: ScheduleSpec
    max_cycles: int = Field(default=6, ge=1)
    seed: Optional[int] = Field(None, description="Semilla (la completa la grilla de seeds)")
    goal_tolerance_fraction: float = Field(
        default_factory=lambda: settings.GOAL_TOLERANCE_FRACTION, gt=0.0
    )
    stop_at_goal: bool = Field(default=True, description="Cortar el episodio al llegar a la meta")
    checkpoint: Optional[str] = Field(None, description="Ruta de checkpoint explícita (opcional)")

    @property
    def n_steps(self) -> int:
        return self.schedule.n_steps

    @property
    def label(self) -> str:
        return f"{self.strategy.value}-{self.schedule.label}"


class CycleRecord(BaseModel):
    """
    Registro por ciclo.
    `reference` es None en el ciclo 0 (no hay chunk previo).
    `drift[k]` = distancia media de las filas del prefijo a la referencia tras el paso k.
    """
    index: int = Field(..., ge=0)
    frame_start: int = Field(..., ge=0, description="Índice del stream donde empieza el marco")
    chunk: PackedArray
    reference: Optional[PackedArray] = None
    overlap_rows: int = Field(default=0, ge=0, description="O = H - s filas solapadas con el chunk previo")
    delay_rows: int = Field(default=0, ge=0, description="d filas del segmento de retardo")
    mode: int = Field(..., ge=0)
    simulated_delay: int = Field(default=0, ge=0)
    guided: bool = False
    drift: List[float] = Field(default_factory=list)

    model_config = ConfigDict(arbitrary_types_allowed=True)


class ExecutionTrace(BaseArtifact):
    """Stream comprometido + registros por ciclo + eco de la configuración"""
    kind: ArtifactKind = ArtifactKind.TRACE
    task: TaskName
    config: ExecConfig
    seed: int
    dt: float = Field(..., gt=0.0, description="Segundos simulados por paso")
    start_position: PackedArray
    goals: PackedArray = Field(..., description="Metas del entorno (G, 2)")
    min_steps: int = Field(default=0, ge=0)
    goal_tolerance: float = Field(..., gt=0.0)
    stream: PackedArray = Field(..., description="(cycles * s, Da)")
    source_cycle: List[int] = Field(default_factory=list, description="Ciclo que generó cada paso")
    cycles: List[CycleRecord] = Field(default_factory=list)
    boundary_indices: List[int] = Field(default_factory=list, description="Puntos de conexión entre chunks")
    reached_goal: bool = False

    @property
    def stride(self) -> int:
        return self.config.schedule.s

    @property
    def mode_labels(self) -> List[int]:
        return [cycle.mode for cycle in self.cycles]

    def overlap_segments(self, delay_only: bool = False) -> List[Tuple[np.ndarray, np.ndarray]]:
        """
        Pares (chunk previo alineado, chunk nuevo) por frontera.
        Ventana completa: filas s..s+O-1 del previo vs 0..O-1 del nuevo.
        delay_only: solo las primeras d filas de esa ventana.
        """
        segments = []
        s = self.stride
        for prev, new in zip(self.cycles[:-1], self.cycles[1:]):
            rows = new.delay_rows if delay_only else new.overlap_rows
            rows = min(rows, new.overlap_rows)
            if rows == 0:
                continue
            segments.append((prev.chunk[s:s + rows], new.chunk[:rows]))
        return segments
