"""
Subcomando `sweep`: ablación del schedule de punta a punta
"""

import logging

import typer

from legato.routers.options import ConfigOption, ForceOption, OutOption, SeedOption, WorkersOption, layout_for
from legato.services.experiment_service import ExperimentService
from legato.services.report_service import ReportService
from legato.services.storage_service import StorageService
from legato.utils.console import console, frame_table
from legato.utils.dependencies import load_run_config
from legato.utils.exceptions import ConfigInvalidError, handle_errors

logger = logging.getLogger(__name__)

router = typer.Typer()


@router.command("sweep")
@handle_errors
def sweep(
    config: ConfigOption,
    out: OutOption = None,
    force: ForceOption = False,
    seed: SeedOption = None,
    workers: WorkersOption = None,
):
    """Rollout + métricas + reporte sobre la grilla de stride o de retardo."""
    run_config = load_run_config(config)
    if run_config.sweep is None:
        raise ConfigInvalidError("la configuración no tiene sección 'sweep'")
    layout = layout_for(run_config, out)
    seeds = [seed] if seed is not None else run_config.seeds
    kind = run_config.sweep.kind
    sweep_dir = layout.sweep_dir(kind)

    executions = ExperimentService.sweep_executions(run_config)
    ExperimentService.run_grid(
        run_config,
        layout,
        executions,
        seeds,
        workers=workers or run_config.workers,
        force=force,
        trace_dir=sweep_dir / "traces",
    )

    traces = ExperimentService.load_traces(sweep_dir / "traces")
    frames = ExperimentService.build_report(traces, sweep_dir / "reports", force=force)
    ablation = ReportService.ablation_frame(frames["metrics"], kind)
    StorageService.save_csv(ablation, sweep_dir / "reports" / "ablation.csv", force)

    swept = "s" if kind == "stride" else "d"
    console.print(frame_table(ablation, "Ablación", ["strategy", swept, "overlap_rmse_x1e3", "mode_switches"]))
