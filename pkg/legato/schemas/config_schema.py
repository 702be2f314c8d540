"""
Schemas Pydantic del archivo de configuración de una corrida
Un único JSON legible por corrida; los valores por defecto siguen la tabla de hiperparámetros
"""

from typing import Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from legato.config import settings
from legato.models.enums import Strategy, StrategyFamily, TaskName, STRATEGY_FAMILIES
from legato.models.policy import TrainConfig
from legato.models.trace import ExecConfig


class TaskSpecSchema(BaseModel):
    """Especificación de la tarea sintética y del dataset"""
    name: TaskName = Field(default=TaskName.BIMODAL_REACH)
    n_demos: int = Field(default=10000, ge=1, description="Cantidad de demostraciones")
    horizon: int = Field(default_factory=lambda: settings.CHUNK_HORIZON, ge=2)
    noise_scale: float = Field(default=0.02, ge=0.0, description="Perturbación gaussiana por demo")
    seed: int = Field(default=0, description="Semilla del generador")
    dataset_path: Optional[str] = Field(None, description="Dataset existente (opcional)")

    # Alcance bimodal
    goal_x: float = Field(default=1.0, gt=0.0, description="|x| de las metas simétricas")
    goal_y: float = Field(default=0.5, description="y de las metas")
    reach_fraction: float = Field(default=0.75, gt=0.0, le=1.0, description="Duración del alcance / H")

    # Vertido oscilante
    period: int = Field(default=40, ge=2, description="Periodo del perfil de vertido (pasos)")
    reach_amplitude: float = Field(default=0.5, description="Amplitud de avance")
    tilt_amplitude: float = Field(default=0.3, description="Amplitud de inclinación")


class SweepSchema(BaseModel):
    """
    Ablación del schedule.
    stride: d fijo, s variable, r = H - s - d
    delay: s fijo, d variable, r = H - s - d
    """
    kind: Literal["stride", "delay"] = Field(default="stride")
    strategies: List[Strategy] = Field(default_factory=lambda: [Strategy.LEGATO, Strategy.RTC_SOFT])
    d: int = Field(default=8, ge=0)
    s: int = Field(default=30, ge=1)
    strides: List[int] = Field(default_factory=lambda: [30, 24, 18, 12])
    delays: List[int] = Field(default_factory=lambda: [10, 8, 6])
    max_cycles: int = Field(default=6, ge=1)
    stop_at_goal: bool = Field(default=True, description="Cortar cada episodio al llegar a la meta")

class RunConfigSchema(BaseModel):
    """Configuración completa de una corrida"""
    name: str = Field(..., min_length=1, description="Nombre de la corrida")
    task: TaskSpecSchema = Field(default_factory=TaskSpecSchema)
    train: TrainConfig = Field(default_factory=TrainConfig)
    families: Optional[List[StrategyFamily]] = Field(
        None, description="Familias a entrenar (por defecto, las que piden las ejecuciones)"
    )
    executions: List[ExecConfig] = Field(default_factory=list)
    seeds: List[int] = Field(default_factory=lambda: list(range(30)))
    output_dir: str = Field(default_factory=lambda: settings.OUTPUT_DIR)
    workers: int = Field(default_factory=lambda: settings.DEFAULT_WORKERS, ge=1)
    checkpoints: Dict[StrategyFamily, str] = Field(
        default_factory=dict, description="Checkpoints existentes por familia"
    )
    sweep: Optional[SweepSchema] = None

    @field_validator("seeds")
    @classmethod
    def validate_seeds(cls, v: List[int]) -> List[int]:
        if len(set(v)) != len(v):
            raise ValueError("las semillas deben ser distintas")
        return v

    @model_validator(mode="after")
    def validate_horizons(self) -> "RunConfigSchema":
        for execution in self.executions:
            if execution.schedule.H != self.task.horizon:
                raise ValueError(
                    f"H del schedule ({execution.schedule.H}) != horizonte de la tarea ({self.task.horizon})"
                )
            if execution.schedule.n_steps != self.train.n_steps:
                raise ValueError("N de inferencia debe coincidir con N de entrenamiento")
        return self

    def required_families(self) -> List[StrategyFamily]:
        """Familias a entrenar, en orden estable"""
        if self.families:
            return list(dict.fromkeys(self.families))
        strategies = [e.strategy for e in self.executions]
        if self.sweep:
            strategies += list(self.sweep.strategies)
        families = [STRATEGY_FAMILIES[strategy][0] for strategy in strategies]
        return list(dict.fromkeys(families))

    model_config = ConfigDict(json_schema_extra={
        "example": {
            "name": "bimodal-reach-main",
            "task": {"name": "bimodal_reach", "n_demos": 10000, "horizon": 60},
            "executions": [
                {"strategy": "legato", "schedule": {"d": 8, "r": 22, "s": 30, "H": 60, "n_steps": 5}},
                {"strategy": "rtc_soft", "schedule": {"d": 8, "r": 22, "s": 30, "H": 60, "n_steps": 5}},
            ],
            "seeds": [0, 1, 2],
        }
    })
