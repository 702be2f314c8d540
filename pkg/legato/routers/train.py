"""
Subcomando `train`: dataset + un checkpoint y una curva de pérdida por familia
"""

import logging

import typer

from legato.routers.options import ConfigOption, ForceOption, OutOption, SeedOption, layout_for
from legato.services.experiment_service import ExperimentService
from legato.utils.console import console
from legato.utils.dependencies import load_run_config
from legato.utils.exceptions import handle_errors

logger = logging.getLogger(__name__)

router = typer.Typer()


@router.command("train")
@handle_errors
def train(
    config: ConfigOption,
    out: OutOption = None,
    force: ForceOption = False,
    seed: SeedOption = None,
):
    """Entrena las familias que piden las ejecuciones (o las listadas en `families`)."""
    run_config = load_run_config(config)
    layout = layout_for(run_config, out)

    written = ExperimentService.train_all(run_config, layout, force=force, seed=seed)
    for path in written:
        console.print(f"✅ checkpoint: {path}")
