"""
Persistencia de artefactos en el sistema de archivos
Un directorio por corrida con subdirectorios fijos; nada se sobreescribe sin --force.
"""

import logging
from pathlib import Path
from typing import Iterator, List, Optional, Type, TypeVar, Union

import pandas as pd
from pydantic import ValidationError

from legato.config import settings
from legato.models.base import BaseArtifact
from legato.models.enums import StrategyFamily, TaskName
from legato.models.policy import ArchitectureDescriptor, CheckpointArtifact
from legato.models.task import DatasetArtifact
from legato.models.trace import ExecutionTrace
from legato.services.policy_service import PolicyService
from legato.utils.exceptions import ArtifactFormatError, CheckpointMismatchError, OutputExistsError
from legato.utils.slug import generate_slug

logger = logging.getLogger(__name__)

A = TypeVar("A", bound=BaseArtifact)

RUN_SUBDIRS = ("datasets", "checkpoints", "curves", "traces", "metrics", "reports")


class RunLayout:
    """Estructura estable del directorio de una corrida"""

    def __init__(self, root: Union[str, Path]):
        self.root = Path(root)

    @classmethod
    def for_run(cls, output_dir: Union[str, Path], run_name: str) -> "RunLayout":
        return cls(Path(output_dir) / generate_slug(run_name))

    def ensure(self) -> "RunLayout":
        for name in RUN_SUBDIRS:
            (self.root / name).mkdir(parents=True, exist_ok=True)
        return self

    @property
    def datasets(self) -> Path:
        return self.root / "datasets"

    @property
    def checkpoints(self) -> Path:
        return self.root / "checkpoints"

    @property
    def curves(self) -> Path:
        return self.root / "curves"

    @property
    def traces(self) -> Path:
        return self.root / "traces"

    @property
    def metrics(self) -> Path:
        return self.root / "metrics"

    @property
    def reports(self) -> Path:
        return self.root / "reports"

    def dataset_path(self, task: TaskName) -> Path:
        return self.datasets / f"{task.value}.json"

    def checkpoint_path(self, family: StrategyFamily) -> Path:
        return self.checkpoints / f"{family.value}.json"

    def sweep_dir(self, kind: str) -> Path:
        """Trazas y reportes de una ablación, separados de la grilla principal"""
        return self.root / f"sweep_{kind}"

    def curve_path(self, family: StrategyFamily) -> Path:
        return self.curves / f"{family.value}_loss.csv"

    def __repr__(self):
        return f"<RunLayout {self.root}>"


class StorageService:

    @staticmethod
    def _guard(path: Path, force: bool) -> None:
        if path.exists() and not force:
            raise OutputExistsError(f"{path} ya existe (usar --force para sobreescribir)")
        path.parent.mkdir(parents=True, exist_ok=True)

    @staticmethod
    def save_artifact(artifact: BaseArtifact, path: Union[str, Path], force: bool = False) -> Path:
        """Sella el digest y escribe el JSON"""
        path = Path(path)
        StorageService._guard(path, force)
        artifact.seal()
        path.write_text(artifact.model_dump_json(), encoding="utf-8")
        logger.debug(f"💾 {artifact.kind.value} guardado en {path}")
        return path

    @staticmethod
    def load_artifact(path: Union[str, Path], model: Type[A]) -> A:
        """Lee y valida un artefacto; rechaza otra versión de formato o un digest alterado"""
        path = Path(path)
        if not path.is_file():
            raise ArtifactFormatError(f"no existe el artefacto: {path}")
        try:
            artifact = model.model_validate_json(path.read_text(encoding="utf-8"))
        except (ValidationError, ValueError) as exc:
            raise ArtifactFormatError(f"artefacto inválido en {path}: {exc}")

        if artifact.format_version != settings.FORMAT_VERSION:
            raise ArtifactFormatError(
                f"{path}: versión de formato {artifact.format_version}, se esperaba {settings.FORMAT_VERSION}"
            )
        if artifact.content_digest is not None and artifact.content_digest != artifact.compute_digest():
            raise ArtifactFormatError(f"{path}: el digest no coincide con el contenido")
        return artifact

    @staticmethod
    def save_dataset(dataset: DatasetArtifact, path: Union[str, Path], force: bool = False) -> Path:
        return StorageService.save_artifact(dataset, path, force)

    @staticmethod
    def load_dataset(path: Union[str, Path]) -> DatasetArtifact:
        return StorageService.load_artifact(path, DatasetArtifact)

    @staticmethod
    def save_checkpoint(checkpoint: CheckpointArtifact, path: Union[str, Path], force: bool = False) -> Path:
        return StorageService.save_artifact(checkpoint, path, force)

    @staticmethod
    def load_checkpoint(
        path: Union[str, Path],
        expected: Optional[ArchitectureDescriptor] = None,
    ) -> CheckpointArtifact:
        try:
            checkpoint = StorageService.load_artifact(path, CheckpointArtifact)
        except ArtifactFormatError as exc:
            raise CheckpointMismatchError(exc.detail)
        PolicyService.check_checkpoint(checkpoint, expected)
        return checkpoint

    @staticmethod
    def save_trace(trace: ExecutionTrace, path: Union[str, Path], force: bool = False) -> Path:
        return StorageService.save_artifact(trace, path, force)

    @staticmethod
    def load_trace(path: Union[str, Path]) -> ExecutionTrace:
        return StorageService.load_artifact(path, ExecutionTrace)

    @staticmethod
    def list_artifacts(directory: Union[str, Path]) -> List[Path]:
        """Archivos JSON de un directorio, en orden estable"""
        directory = Path(directory)
        if not directory.is_dir():
            return []
        return sorted(directory.glob("*.json"))

    @staticmethod
    def iter_traces(directory: Union[str, Path]) -> Iterator[ExecutionTrace]:
        for path in StorageService.list_artifacts(directory):
            yield StorageService.load_trace(path)

    @staticmethod
    def save_csv(frame: pd.DataFrame, path: Union[str, Path], force: bool = False) -> Path:
        path = Path(path)
        StorageService._guard(path, force)
        frame.to_csv(path, index=False, float_format="%.17g", lineterminator="\n")
        return path
