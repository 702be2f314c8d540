"""
Legato CLI - aplicación typer
Continuación entre chunks de acciones para políticas de flow matching
"""

import logging
import sys

import typer

from legato.config import settings
from legato.routers import metrics, oracle, report, rollout, sweep, train
from legato.utils.exceptions import EXIT_OK, EXIT_USAGE, LegatoError

# Configurar logging
logging.basicConfig(
    level=getattr(logging, settings.LOG_LEVEL.upper(), logging.INFO),
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)


# Crear aplicación
app = typer.Typer(
    name=settings.APP_NAME,
    help="Entrenamiento, simulación con retardo y métricas de suavidad para políticas por chunks",
    no_args_is_help=True,
    add_completion=False,
)


@app.callback()
def main_callback(
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Logs en nivel DEBUG"),
):
    """Legato"""
    if verbose or settings.DEBUG:
        logging.getLogger().setLevel(logging.DEBUG)


# Registrar subcomandos
app.add_typer(train.router)
app.add_typer(rollout.router)
app.add_typer(metrics.router)
app.add_typer(report.router)
app.add_typer(oracle.router)
app.add_typer(sweep.router)


def _is_parser_error(exc: BaseException) -> bool:
    """Errores de uso del parser (comando u opción desconocida), vengan de click o de la copia interna de typer"""
    return callable(getattr(exc, "show", None)) and isinstance(getattr(exc, "exit_code", None), int)


def run() -> int:
    """
    Punto de entrada con códigos de salida estables:
    0 = éxito, 1 = uso/configuración, 2 = verificación fallida.
    """
    try:
        result = app(standalone_mode=False)
    except typer.Exit as exc:
        return exc.exit_code
    except typer.Abort:
        logger.warning("🛑 Cancelado")
        return EXIT_USAGE
    except LegatoError as exc:
        logger.error(f"❌ {type(exc).__name__}: {exc.detail}")
        return exc.exit_code
    except Exception as exc:
        if not _is_parser_error(exc):
            raise
        exc.show()
        return EXIT_USAGE
    return result if isinstance(result, int) else EXIT_OK


if __name__ == "__main__":
    sys.exit(run())
