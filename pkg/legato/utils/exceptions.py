"""
Jerarquía de errores de Legato
Cada error lleva un detalle legible y el código de salida del CLI
"""

import functools
import logging
from typing import Callable, TypeVar

import typer

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_CHECK_FAILED = 2

F = TypeVar("F", bound=Callable)


class LegatoError(Exception):
    """
    Error base. Equivalente a HTTPException: `detail` para el mensaje
    y `exit_code` en lugar del status HTTP.
    """

    exit_code: int = EXIT_USAGE

    def __init__(self, detail: str, exit_code: int = None):
        super().__init__(detail)
        self.detail = detail
        if exit_code is not None:
            self.exit_code = exit_code

    def __str__(self) -> str:
        return self.detail


class InvalidParamsError(LegatoError):
    """Parámetros de schedule inválidos (bug de configuración)"""


class ShapeMismatchError(LegatoError):
    """Formas de chunk incompatibles"""


class DimensionMismatchError(LegatoError):
    """Entrada incompatible con la arquitectura de la red"""


class StepOverflowError(LegatoError):
    """Paso de denoising fuera de rango (k >= N)"""


class DivergenceError(LegatoError):
    """Pérdida no finita durante el entrenamiento"""


class NonFiniteActionError(LegatoError):
    """Acción no finita durante un episodio"""


class UndefinedMetricError(LegatoError):
    """Métrica indefinida para la entrada dada"""


class StrategyMismatchError(LegatoError):
    """La estrategia no corresponde a la familia del checkpoint"""


class CheckpointMismatchError(LegatoError):
    """Checkpoint con arquitectura o formato distinto al esperado"""


class ConfigInvalidError(LegatoError):
    """Archivo de configuración inválido"""


class OutputExistsError(LegatoError):
    """El archivo de salida ya existe y no se pasó --force"""


class NoTracesError(LegatoError):
    """No hay trazas para agregar"""


class ArtifactFormatError(LegatoError):
    """Archivo de artefacto ilegible, de otra versión o con digest inválido"""


class CheckFailedError(LegatoError):
    """Falló una verificación del oráculo"""

    exit_code = EXIT_CHECK_FAILED


def handle_errors(func: F) -> F:
    """
    Decorador para comandos del CLI.
    Convierte LegatoError en typer.Exit con el código correspondiente.
    """

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except LegatoError as exc:
            logger.error(f"❌ {type(exc).__name__}: {exc.detail}")
            raise typer.Exit(code=exc.exit_code)

    return wrapper  # type: ignore[return-value]
