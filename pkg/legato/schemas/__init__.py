"""
Schemas Pydantic para validación de los archivos de configuración
"""

from .config_schema import (
    TaskSpecSchema,
    SweepSchema,
    RunConfigSchema,
)
