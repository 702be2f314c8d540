"""
Salida de consola con rich
"""

from typing import Iterable, Optional, Sequence

import pandas as pd
from rich.console import Console
from rich.table import Table

from legato.models.oracle import CheckResult

console = Console()


def frame_table(frame: pd.DataFrame, title: str, columns: Optional[Sequence[str]] = None) -> Table:
    """Tabla rich a partir de un DataFrame (floats con 4 cifras significativas)"""
    columns = list(columns or frame.columns)
    table = Table(title=title)
    for column in columns:
        table.add_column(str(column))
    for _, row in frame[columns].iterrows():
        table.add_row(*[f"{v:.4g}" if isinstance(v, float) else str(v) for v in row])
    return table


def checks_table(results: Iterable[CheckResult]) -> Table:
    table = Table(title="Oráculo analítico")
    for column in ("check", "estado", "peor error", "umbral", "casos"):
        table.add_column(column)
    for result in results:
        status = "[green]OK[/green]" if result.passed else "[red]FALLA[/red]"
        table.add_row(result.name, status, f"{result.value:.3e}", f"{result.threshold:.1e}", str(result.cases))
    return table
