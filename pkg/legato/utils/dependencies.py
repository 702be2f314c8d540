"""
Dependencias compartidas por los comandos del CLI
Carga de la configuración de corrida y generadores aleatorios derivados
"""

import json
import logging
import zlib
from pathlib import Path
from typing import Union

import numpy as np
from pydantic import ValidationError

from legato.schemas.config_schema import RunConfigSchema
from legato.utils.exceptions import ConfigInvalidError, InvalidParamsError

logger = logging.getLogger(__name__)


def load_run_config(path: Union[str, Path]) -> RunConfigSchema:
    """
    Lee y valida el archivo de configuración.

    Raises:
        ConfigInvalidError: archivo inexistente, JSON inválido o schema inválido
    """
    path = Path(path)
    if not path.is_file():
        raise ConfigInvalidError(f"no existe el archivo de configuración: {path}")

    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigInvalidError(f"JSON inválido en {path}: {exc}")

    try:
        return RunConfigSchema.model_validate(raw)
    except ValidationError as exc:
        errors = "; ".join(
            f"{'.'.join(str(p) for p in err['loc'])}: {err['msg']}" for err in exc.errors()
        )
        raise ConfigInvalidError(f"configuración inválida ({path}): {errors}")
    except InvalidParamsError as exc:
        raise ConfigInvalidError(f"configuración inválida ({path}): {exc.detail}")


def label_key(label: str) -> int:
    """Etiqueta estable -> entero (crc32), para separar flujos aleatorios"""
    return zlib.crc32(label.encode("utf-8")) & 0xFFFFFFFF


def derive_rng(seed: int, *labels: str) -> np.random.Generator:
    """
    Generador determinista para (semilla, etiquetas).
    La misma semilla y etiquetas dan el mismo flujo en cualquier proceso.
    """
    entropy = [int(seed)] + [label_key(label) for label in labels]
    return np.random.default_rng(np.random.SeedSequence(entropy))
