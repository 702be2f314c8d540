"""
Modelo base de artefactos persistidos y tipo de arreglo empaquetado
"""

import base64
import hashlib
from typing import Annotated, Any, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, PlainSerializer, PlainValidator

from legato.config import settings
from .enums import ArtifactKind

# Orden de bytes documentado: little-endian IEEE-754 float64, orden C
PACKED_DTYPE = "<f8"


def _decode_array(value: Any) -> np.ndarray:
    """Acepta ndarray, listas o el dict empaquetado {dtype, shape, data}"""
    if isinstance(value, np.ndarray):
        return np.asarray(value, dtype=np.float64)
    if isinstance(value, dict):
        if value.get("dtype") != PACKED_DTYPE:
            raise ValueError(f"dtype no soportado: {value.get('dtype')}")
        raw = base64.b64decode(value["data"])
        flat = np.frombuffer(raw, dtype=PACKED_DTYPE).astype(np.float64)
        return flat.reshape(tuple(value["shape"]))
    return np.asarray(value, dtype=np.float64)


def _encode_array(arr: np.ndarray) -> dict:
    packed = np.ascontiguousarray(arr, dtype=PACKED_DTYPE)
    return {
        "dtype": PACKED_DTYPE,
        "shape": list(packed.shape),
        "data": base64.b64encode(packed.tobytes()).decode("ascii"),
    }


PackedArray = Annotated[
    np.ndarray,
    PlainValidator(_decode_array),
    PlainSerializer(_encode_array, when_used="json"),
]


class BaseArtifact(BaseModel):
    """
    Modelo base de todo artefacto en disco.
    Incluye campos de versión y un digest del contenido (equivalente a revision_id).
    """
    format_version: int = Field(default_factory=lambda: settings.FORMAT_VERSION)
    kind: ArtifactKind
    generator: str = Field(default_factory=lambda: f"{settings.APP_NAME} {settings.APP_VERSION}")
    content_digest: Optional[str] = None

    model_config = ConfigDict(arbitrary_types_allowed=True)

    def compute_digest(self) -> str:
        """sha256 del contenido serializado, sin el propio digest"""
        payload = self.model_dump_json(exclude={"content_digest"})
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()

    def seal(self) -> "BaseArtifact":
        """Actualiza el digest antes de guardar (hook pre_save del modelo original)"""
        self.content_digest = self.compute_digest()
        return self
