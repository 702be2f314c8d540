"""
Nombres de directorio y de archivo estables para corridas y celdas de la grilla
"""

import re
import unicodedata

from legato.utils.exceptions import InvalidParamsError

_NON_ALNUM = re.compile(r"[^a-z0-9]+")

MAX_RUN_SLUG = 64


def generate_slug(run_name: str, fallback: str = "corrida") -> str:
    """
    Directorio de una corrida a partir de su nombre legible.
    Ej: "Prueba rápida #01" -> "prueba-rapida-01". Sin caracteres útiles se usa `fallback`.
    """
    plain = unicodedata.normalize("NFKD", run_name).encode("ascii", "ignore").decode("ascii")
    slug = _NON_ALNUM.sub("-", plain.lower()).strip("-")
    return slug[:MAX_RUN_SLUG].rstrip("-") or fallback


def cell_slug(strategy: str, schedule_label: str, seed: int) -> str:
    """Archivo de una celda: estrategia__schedule__seedNNN (orden lexicográfico = orden de la grilla)"""
    if seed < 0:
        raise InvalidParamsError(f"semilla negativa: {seed}")
    parts = [_NON_ALNUM.sub("-", part.lower()).strip("-") for part in (strategy, schedule_label)]
    if not all(parts):
        raise InvalidParamsError(f"celda sin nombre: {strategy!r} / {schedule_label!r}")
    return f"{parts[0]}__{parts[1]}__seed{seed:03d}"
