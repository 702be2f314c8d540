"""
Opciones compartidas por los subcomandos
"""

from pathlib import Path
from typing import Annotated, Optional

import typer

from legato.schemas.config_schema import RunConfigSchema
from legato.services.storage_service import RunLayout

ConfigOption = Annotated[Path, typer.Option("--config", "-c", help="Archivo JSON de la corrida")]
OutOption = Annotated[Optional[Path], typer.Option("--out", "-o", help="Directorio de salida (reemplaza output_dir)")]
ForceOption = Annotated[bool, typer.Option("--force", help="Sobreescribir archivos existentes")]
SeedOption = Annotated[Optional[int], typer.Option("--seed", help="Semilla única (reemplaza la de la config)")]
WorkersOption = Annotated[Optional[int], typer.Option("--workers", min=1, help="Procesos en paralelo")]


def layout_for(config: RunConfigSchema, out: Optional[Path]) -> RunLayout:
    return RunLayout.for_run(out or config.output_dir, config.name).ensure()
