"""
Subcomando `report`: agregados media ± error estándar y datos de figuras
"""

import logging
from pathlib import Path
from typing import Annotated, Optional

import typer

from legato.routers.options import ConfigOption, ForceOption, OutOption, layout_for
from legato.services.experiment_service import ExperimentService
from legato.utils.console import console, frame_table
from legato.utils.dependencies import load_run_config
from legato.utils.exceptions import handle_errors

logger = logging.getLogger(__name__)

router = typer.Typer()


@router.command("report")
@handle_errors
def report(
    config: ConfigOption,
    out: OutOption = None,
    force: ForceOption = False,
    trace_dir: Annotated[Optional[Path], typer.Option("--trace-dir", help="Directorio de trazas")] = None,
):
    """Agrega todas las trazas por estrategia y schedule."""
    run_config = load_run_config(config)
    layout = layout_for(run_config, out)

    traces = ExperimentService.load_traces(trace_dir or layout.traces)
    frames = ExperimentService.build_report(traces, layout.reports, force=force)

    summary = frames["summary"]
    shown = summary[summary["metric"].isin(["overlap_rmse_x1e3", "mode_switches", "nsparc", "nldlj"])]
    console.print(frame_table(shown, "Resumen (media ± SE)"))
    console.print(f"✅ reportes en {layout.reports}")
