"""
Subcomando `oracle-check`: suite analítica sin modelo
"""

import logging
from typing import Annotated

import typer

from legato.services.oracle_service import OracleService
from legato.utils.console import checks_table, console
from legato.utils.exceptions import CheckFailedError, handle_errors

logger = logging.getLogger(__name__)

router = typer.Typer()


@router.command("oracle-check")
@handle_errors
def oracle_check(
    seed: Annotated[int, typer.Option("--seed", help="Semilla de los casos aleatorios")] = 0,
    cases: Annotated[int, typer.Option("--cases", min=1, help="Casos de consistencia")] = 1000,
):
    """Consistencia del camino, reducciones, recurrencia, prefijo y chequeo de gradiente."""
    results = OracleService.run_all(seed=seed, cases=cases)
    console.print(checks_table(results))

    failed = [result.name for result in results if not result.passed]
    if failed:
        raise CheckFailedError(f"verificaciones fallidas: {', '.join(failed)}")
