"""
Resultado de una verificación del oráculo analítico
"""

from typing import Optional

from pydantic import BaseModel, Field


class CheckResult(BaseModel):
    name: str
    passed: bool
    value: float = Field(..., description="Peor error observado")
    threshold: float
    cases: int = Field(default=1, ge=0)
    detail: Optional[str] = None

    def __str__(self):
        status = "OK" if self.passed else "FALLA"
        return f"[{status}] {self.name}: {self.value:.3e} (umbral {self.threshold:.1e}, {self.cases} casos)"
