"""
Configuración de la aplicación
Variables de entorno y valores por defecto de los experimentos
"""

from pydantic_settings import BaseSettings, SettingsConfigDict
from typing import Tuple


class Settings(BaseSettings):
    """Configuración global usando variables de entorno (prefijo LEGATO_)"""

    # App
    APP_NAME: str = "legato"
    APP_VERSION: str = "1.0.0"
    DEBUG: bool = False
    LOG_LEVEL: str = "INFO"

    # Formato de artefactos
    FORMAT_VERSION: int = 1

    # Chunking (Tabla de hiperparámetros del método)
    CHUNK_HORIZON: int = 60
    DENOISE_STEPS: int = 5
    CONTROL_HZ: float = 30.0

    # Rangos de aleatorización del schedule durante entrenamiento
    TRAIN_D_RANGE: Tuple[int, int] = (0, 10)
    TRAIN_R_RANGE: Tuple[int, int] = (0, 50)

    # Métricas de suavidad
    SPARC_THRESHOLD: float = 0.05
    SPARC_MAX_CUTOFF_HZ: float = 10.0
    SPARC_PAD_LEVEL: int = 4

    # Ejecución
    GOAL_TOLERANCE_FRACTION: float = 0.05  # 5% de la distancia a la meta
    DEFAULT_WORKERS: int = 1

    # Salidas
    OUTPUT_DIR: str = "runs"

    @property
    def delta_t(self) -> float:
        """Paso de integración por defecto (1/N)"""
        return 1.0 / self.DENOISE_STEPS

    @property
    def control_dt(self) -> float:
        """Segundos simulados por paso de control"""
        return 1.0 / self.CONTROL_HZ

    model_config = SettingsConfigDict(
        env_prefix="LEGATO_",
        env_file=".env",
        case_sensitive=True,
        extra="ignore",
    )


# Instancia singleton de Settings
settings = Settings()
