"""
Estado del proceso de denoising guiado
Un chunk es una matriz H x Da de acciones (np.ndarray float64)
"""

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from .base import PackedArray

Chunk = np.ndarray


class DenoiseState(BaseModel):
    """Estado Y_k en el paso k, con t = k * dt"""
    y: PackedArray = Field(..., description="Chunk guiado actual")
    k: int = Field(..., ge=0, description="Índice del paso")
    t: float = Field(..., ge=0.0, le=1.0, description="Tiempo de flujo")

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    def __repr__(self):
        return f"<DenoiseState k={self.k} t={self.t:.3f}>"
