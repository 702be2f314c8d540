"""
Modelos del schedule de guía (d, r, s, H) y su vector omega
"""

from typing import List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from legato.config import settings
from legato.utils.exceptions import InvalidParamsError
from .base import PackedArray


class ScheduleParams(BaseModel):
    """
    Parámetros escalares del schedule.
    d: retardo de inferencia (prefijo con guía completa)
    r: longitud de la rampa
    s: pasos ejecutados por ciclo
    H: horizonte del chunk
    """
    d: int = Field(..., description="Retardo de inferencia / prefijo guiado")
    r: int = Field(..., description="Longitud de la rampa")
    s: int = Field(..., description="Paso ejecutado por ciclo")
    H: int = Field(..., description="Horizonte del chunk")
    rtc_constraint: bool = Field(default=False, description="Exigir r + s + d = H")

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def validate_ranges(self) -> "ScheduleParams":
        if self.d < 0 or self.r < 0:
            raise InvalidParamsError(f"d y r deben ser >= 0 (d={self.d}, r={self.r})")
        if not 1 <= self.s <= self.H:
            raise InvalidParamsError(f"s fuera de rango: s={self.s}, H={self.H}")
        if self.d + self.r > self.H:
            raise InvalidParamsError(f"d + r > H ({self.d} + {self.r} > {self.H})")
        if self.rtc_constraint and self.r + self.s + self.d != self.H:
            raise InvalidParamsError(
                f"r + s + d != H ({self.r} + {self.s} + {self.d} != {self.H})"
            )
        return self

    @property
    def label(self) -> str:
        return f"d{self.d}-s{self.s}-r{self.r}"

    def __str__(self):
        return f"(d={self.d}, s={self.s}, r={self.r}, H={self.H})"


class GuidanceSchedule(BaseModel):
    """
    Vector de continuación omega en [0,1]^H, kappa = omega / dt y dt = 1/N.
    Inmutable: se puede compartir entre workers.
    """
    omega: PackedArray
    kappa: PackedArray
    delta_t: float
    n_steps: int
    params: Optional[ScheduleParams] = None

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    @model_validator(mode="after")
    def validate_vectors(self) -> "GuidanceSchedule":
        if self.n_steps < 1:
            raise InvalidParamsError(f"n_steps debe ser >= 1 (n_steps={self.n_steps})")
        if self.omega.ndim != 1 or self.kappa.shape != self.omega.shape:
            raise InvalidParamsError("omega y kappa deben ser vectores de longitud H")
        if np.any(self.omega < 0.0) or np.any(self.omega > 1.0):
            raise InvalidParamsError("omega debe estar en [0, 1]")
        if self.params is not None and self.params.H != self.omega.shape[0]:
            raise InvalidParamsError("longitud de omega distinta de H")
        return self

    @property
    def horizon(self) -> int:
        return int(self.omega.shape[0])

    @property
    def prefix_mask(self) -> np.ndarray:
        """Filas con guía completa (omega == 1)"""
        return self.omega == 1.0

    def __repr__(self):
        return f"<GuidanceSchedule H={self.horizon} N={self.n_steps} {self.params}>"


class ScheduleSpec(BaseModel):
    """
    Schedule serializado en los archivos de configuración: {d, r, s, H, n_steps}
    y un omega explícito opcional que reemplaza a (d, r).
    """
    d: int = Field(..., ge=0, description="Prefijo con guía completa")
    r: int = Field(..., ge=0, description="Longitud de la rampa")
    s: int = Field(..., ge=1, description="Paso ejecutado por ciclo")
    H: int = Field(default_factory=lambda: settings.CHUNK_HORIZON, ge=1, description="Horizonte")
    n_steps: int = Field(default_factory=lambda: settings.DENOISE_STEPS, ge=1, description="Pasos de denoising N")
    omega: Optional[List[float]] = Field(None, description="Vector explícito (opcional)")
    rtc_constraint: bool = Field(default=False, description="Exigir r + s + d = H")

    model_config = ConfigDict(json_schema_extra={
        "example": {"d": 8, "r": 22, "s": 30, "H": 60, "n_steps": 5}
    })

    @field_validator("omega")
    @classmethod
    def validate_omega(cls, v: Optional[List[float]]) -> Optional[List[float]]:
        if v is not None and any(w < 0.0 or w > 1.0 for w in v):
            raise ValueError("omega debe estar en [0, 1]")
        return v

    @property
    def label(self) -> str:
        return f"d{self.d}-s{self.s}-r{self.r}"

    def to_params(self) -> ScheduleParams:
        return ScheduleParams(d=self.d, r=self.r, s=self.s, H=self.H, rtc_constraint=self.rtc_constraint)
