"""
Subcomando `metrics`: un reporte JSON por traza
"""

import logging
from pathlib import Path
from typing import Annotated, Optional

import typer

from legato.routers.options import ConfigOption, ForceOption, OutOption, layout_for
from legato.services.experiment_service import ExperimentService
from legato.utils.console import console
from legato.utils.dependencies import load_run_config
from legato.utils.exceptions import handle_errors

logger = logging.getLogger(__name__)

router = typer.Typer()


@router.command("metrics")
@handle_errors
def metrics(
    config: ConfigOption,
    out: OutOption = None,
    force: ForceOption = False,
    trace_dir: Annotated[Optional[Path], typer.Option("--trace-dir", help="Directorio de trazas")] = None,
):
    """Calcula NSPARC, NLDLJ, overlap RMSE, cambios de modo y tiempo de completado."""
    run_config = load_run_config(config)
    layout = layout_for(run_config, out)

    reports = ExperimentService.compute_metrics(trace_dir or layout.traces, layout.metrics, force=force)
    console.print(f"✅ {len(reports)} reportes en {layout.metrics}")
