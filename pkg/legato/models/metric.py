"""
Modelos de métricas: stream de comandos, bloques de movimiento y reporte por traza
"""

from typing import List, Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from .base import BaseArtifact, PackedArray
from .enums import ArtifactKind, TaskName
from .trace import ExecConfig


class MotionBlock(BaseModel):
    """Grupo de columnas que forman un efector (traslacional o rotacional)"""
    columns: List[int] = Field(..., min_length=1)
    rotational: bool = Field(default=False, description="Ángulos: se desenvuelven antes de derivar")

    model_config = ConfigDict(frozen=True)


class CommandStream(BaseModel):
    """
    Muestras T x Da con paso dt.
    kind="displacement": cada fila es un desplazamiento por paso (v = muestra / dt).
    kind="position": cada fila es una posición (v por diferencias centrales).
    """
    samples: PackedArray
    dt: float = Field(..., gt=0.0)
    kind: Literal["displacement", "position"] = "displacement"
    blocks: Optional[List[MotionBlock]] = None

    model_config = ConfigDict(arbitrary_types_allowed=True)

    @model_validator(mode="after")
    def validate_samples(self) -> "CommandStream":
        if self.samples.ndim == 1:
            self.samples = self.samples[:, None]
        if self.samples.ndim != 2:
            raise ValueError(f"las muestras deben ser T x Da, forma {self.samples.shape}")
        return self

    @property
    def length(self) -> int:
        return int(self.samples.shape[0])

    @property
    def motion_blocks(self) -> List[MotionBlock]:
        if self.blocks:
            return self.blocks
        return [MotionBlock(columns=list(range(self.samples.shape[1])))]

    def scaled(self, factor: float) -> "CommandStream":
        return self.model_copy(update={"samples": self.samples * factor})

    def reversed(self) -> "CommandStream":
        return self.model_copy(update={"samples": self.samples[::-1].copy()})


class MetricReport(BaseArtifact):
    """NSPARC / NLDLJ / overlap RMSE / cambios de modo / tiempo de completado"""
    kind: ArtifactKind = ArtifactKind.METRICS
    task: TaskName
    config: ExecConfig
    seed: int
    nsparc: float
    nldlj: float
    overlap_rmse: Optional[float] = Field(None, description="Ventana completa O = H - s (sin escalar)")
    delay_overlap_rmse: Optional[float] = Field(None, description="Solo el segmento de retardo d")
    mode_switches: int = Field(..., ge=0)
    completion_steps: Optional[int] = Field(None, ge=0)
    cycles: int = Field(..., ge=0)

    @property
    def overlap_rmse_x1e3(self) -> Optional[float]:
        return None if self.overlap_rmse is None else self.overlap_rmse * 1e3


class SignTestResult(BaseModel):
    """Test de signo pareado por semilla: ¿`better` tiene menor valor que `baseline`?"""
    metric: str
    better: str
    baseline: str
    wins: int = Field(..., ge=0)
    losses: int = Field(..., ge=0)
    ties: int = Field(..., ge=0)
    p_value: float = Field(..., ge=0.0, le=1.0)

    @property
    def pairs(self) -> int:
        return self.wins + self.losses + self.ties

    @property
    def win_rate(self) -> float:
        return self.wins / self.pairs if self.pairs else 0.0
