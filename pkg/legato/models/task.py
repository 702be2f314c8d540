"""
Modelos de las tareas sintéticas: estado del entorno, demostraciones y dataset
"""

from typing import Any, Dict, List

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from .base import BaseArtifact, PackedArray
from .enums import ArtifactKind, TaskName


class EnvState(BaseModel):
    """Posición 2D del agente, conjunto de metas e índice de tiempo"""
    position: PackedArray
    goals: PackedArray = Field(..., description="Metas, forma (G, 2)")
    time: int = Field(default=0, ge=0)
    min_steps: int = Field(default=0, ge=0, description="Pasos mínimos antes de evaluar la meta")

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    @model_validator(mode="after")
    def validate_state(self) -> "EnvState":
        if self.goals.ndim != 2 or self.goals.shape[0] < 1:
            raise ValueError("se requiere al menos una meta")
        if not np.all(np.isfinite(self.position)):
            raise ValueError("posición no finita")
        return self


class Demonstration(BaseModel):
    """Par (observación, chunk experto) con la etiqueta de modo"""
    observation: PackedArray
    chunk: PackedArray
    mode: int = Field(..., ge=0)
    start_position: PackedArray

    model_config = ConfigDict(arbitrary_types_allowed=True)


class DatasetArtifact(BaseArtifact):
    """
    Contenedor versionado del dataset.
    Encabezado {H, Da, obs_dim, n_demos, seed, generador + parámetros}
    y arreglos empaquetados (little-endian float64).
    """
    kind: ArtifactKind = ArtifactKind.DATASET
    task: TaskName
    horizon: int
    action_dim: int
    obs_dim: int
    n_demos: int
    seed: int
    generator_params: Dict[str, Any] = Field(default_factory=dict)
    observations: PackedArray = Field(..., description="(n_demos, obs_dim)")
    chunks: PackedArray = Field(..., description="(n_demos, H, Da)")
    modes: List[int]
    start_positions: PackedArray = Field(..., description="(n_demos, 2)")

    @model_validator(mode="after")
    def validate_shapes(self) -> "DatasetArtifact":
        if self.chunks.shape != (self.n_demos, self.horizon, self.action_dim):
            raise ValueError(f"forma de chunks inválida: {self.chunks.shape}")
        if self.observations.shape != (self.n_demos, self.obs_dim):
            raise ValueError(f"forma de observaciones inválida: {self.observations.shape}")
        if len(self.modes) != self.n_demos:
            raise ValueError("cantidad de etiquetas de modo distinta de n_demos")
        return self

    def demonstration(self, index: int) -> Demonstration:
        return Demonstration(
            observation=self.observations[index],
            chunk=self.chunks[index],
            mode=self.modes[index],
            start_position=self.start_positions[index],
        )

    def __len__(self) -> int:
        return self.n_demos
