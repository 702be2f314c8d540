"""
Modelos de la política: descriptor de arquitectura, red MLP y checkpoint
"""

from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from legato.config import settings
from .base import BaseArtifact, PackedArray
from .enums import Activation, ArtifactKind, StrategyFamily, TaskName


class TrainConfig(BaseModel):
    """Configuración de entrenamiento de la política"""
    family: StrategyFamily = Field(default=StrategyFamily.LEGATO)
    learning_rate: float = Field(default=1e-3, gt=0.0)
    batch_size: int = Field(default=256, ge=1)
    steps: int = Field(default=3000, ge=0, description="Pasos de optimización (0 = solo inicialización)")
    seed: int = Field(default=0)
    d_range: Tuple[int, int] = Field(default_factory=lambda: settings.TRAIN_D_RANGE)
    r_range: Tuple[int, int] = Field(default_factory=lambda: settings.TRAIN_R_RANGE)
    n_steps: int = Field(default_factory=lambda: settings.DENOISE_STEPS, ge=1)
    condition_row: bool = Field(default=True, description="Agregar omega como columna extra")
    hidden_sizes: List[int] = Field(default_factory=lambda: [256, 256])
    activation: Activation = Field(default=Activation.TANH)
    time_embedding_dim: int = Field(default=4, ge=0, description="Frecuencias del embedding de t")
    beta1: float = Field(default=0.9, gt=0.0, lt=1.0)
    beta2: float = Field(default=0.999, gt=0.0, lt=1.0)
    adam_eps: float = Field(default=1e-8, gt=0.0)
    log_every: int = Field(default=100, ge=1)

    @field_validator("d_range", "r_range")
    @classmethod
    def validate_range(cls, v: Tuple[int, int]) -> Tuple[int, int]:
        lo, hi = v
        if lo < 0 or hi < lo:
            raise ValueError(f"rango inválido: {v}")
        return v

    @field_validator("hidden_sizes")
    @classmethod
    def validate_hidden(cls, v: List[int]) -> List[int]:
        if any(width < 1 for width in v):
            raise ValueError("anchos de capa deben ser >= 1")
        return v


class ArchitectureDescriptor(BaseModel):
    """
    Describe la disposición de entrada/salida del MLP.
    Entrada = chunk condicionado H x (Da + 1) aplanado + observación + embedding de t
    Salida = velocidad H x Da
    """
    horizon: int = Field(..., ge=1)
    action_dim: int = Field(..., ge=1)
    obs_dim: int = Field(..., ge=0)
    hidden_sizes: List[int] = Field(default_factory=lambda: [256, 256])
    activation: Activation = Field(default=Activation.TANH)
    time_embedding_dim: int = Field(default=4, ge=0, description="Frecuencias senoidales de t")
    condition_row: bool = Field(default=True, description="Si False la columna extra va en cero")

    model_config = ConfigDict(frozen=True)

    @property
    def time_features(self) -> int:
        return 1 + 2 * self.time_embedding_dim

    @property
    def input_dim(self) -> int:
        return self.horizon * (self.action_dim + 1) + self.obs_dim + self.time_features

    @property
    def output_dim(self) -> int:
        return self.horizon * self.action_dim

    @property
    def layer_shapes(self) -> List[Tuple[int, int]]:
        sizes = [self.input_dim, *self.hidden_sizes, self.output_dim]
        return list(zip(sizes[:-1], sizes[1:]))

    @property
    def n_params(self) -> int:
        return sum(fan_in * fan_out + fan_out for fan_in, fan_out in self.layer_shapes)


class PolicyNet(BaseModel):
    """
    Red f_theta(Y, o, t, omega). Los parámetros viven en un único vector plano
    `theta`; las capas son vistas sobre ese vector.
    """
    descriptor: ArchitectureDescriptor
    family: StrategyFamily = Field(default=StrategyFamily.LEGATO)
    theta: PackedArray

    model_config = ConfigDict(arbitrary_types_allowed=True)

    def layers(self, theta: Optional[np.ndarray] = None) -> List[Tuple[np.ndarray, np.ndarray]]:
        """Vistas (W, b) por capa sobre `theta` (o sobre un vector con el mismo layout)"""
        flat = self.theta if theta is None else theta
        views = []
        offset = 0
        for fan_in, fan_out in self.descriptor.layer_shapes:
            w = flat[offset:offset + fan_in * fan_out].reshape(fan_in, fan_out)
            offset += fan_in * fan_out
            b = flat[offset:offset + fan_out]
            offset += fan_out
            views.append((w, b))
        return views

    def copy(self) -> "PolicyNet":
        return PolicyNet(descriptor=self.descriptor, family=self.family, theta=self.theta.copy())

    def __repr__(self):
        return f"<PolicyNet {self.family.value} params={self.descriptor.n_params}>"


class CheckpointArtifact(BaseArtifact):
    """Checkpoint versionado: descriptor + vector plano + configuración + semilla"""
    kind: ArtifactKind = ArtifactKind.CHECKPOINT
    family: StrategyFamily
    task: TaskName
    descriptor: ArchitectureDescriptor
    theta: PackedArray
    train_config: TrainConfig
    seed: int
    steps_done: int = 0
    final_loss: Optional[float] = None

    def to_net(self) -> PolicyNet:
        return PolicyNet(descriptor=self.descriptor, family=self.family, theta=self.theta.copy())


class TrainingBatch(BaseModel):
    """
    Batch ya ensamblado para la red: entradas planas, objetivos planos y máscara de pérdida.
    inputs (B, input_dim), targets y mask (B, H * Da).
    """
    inputs: PackedArray
    targets: PackedArray
    mask: PackedArray

    model_config = ConfigDict(arbitrary_types_allowed=True)

    @property
    def size(self) -> int:
        return int(self.inputs.shape[0])
