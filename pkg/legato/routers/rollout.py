"""
Subcomando `rollout`: grilla estrategia x schedule x semilla, una traza por celda
"""

import logging

import typer

from legato.routers.options import ConfigOption, ForceOption, OutOption, SeedOption, WorkersOption, layout_for
from legato.services.experiment_service import ExperimentService
from legato.utils.console import console
from legato.utils.dependencies import load_run_config
from legato.utils.exceptions import handle_errors

logger = logging.getLogger(__name__)

router = typer.Typer()


@router.command("rollout")
@handle_errors
def rollout(
    config: ConfigOption,
    out: OutOption = None,
    force: ForceOption = False,
    seed: SeedOption = None,
    workers: WorkersOption = None,
):
    """Corre todas las ejecuciones de la config sobre todas sus semillas."""
    run_config = load_run_config(config)
    layout = layout_for(run_config, out)
    seeds = [seed] if seed is not None else run_config.seeds

    paths = ExperimentService.run_grid(
        run_config,
        layout,
        run_config.executions,
        seeds,
        workers=workers or run_config.workers,
        force=force,
    )
    console.print(f"✅ {len(paths)} trazas en {layout.traces}")
