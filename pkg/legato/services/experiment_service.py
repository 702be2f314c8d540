"""
Servicio de orquestación de corridas
Dataset -> entrenamiento por familia -> grilla estrategia x schedule x semilla -> métricas -> reportes
"""

import logging
from concurrent.futures import ProcessPoolExecutor
from functools import lru_cache
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import pandas as pd

from legato.models.enums import STRATEGY_FAMILIES, Strategy, StrategyFamily
from legato.models.metric import MetricReport
from legato.models.policy import CheckpointArtifact
from legato.models.task import DatasetArtifact
from legato.models.trace import ExecConfig, ExecutionTrace
from legato.schemas.config_schema import RunConfigSchema, TaskSpecSchema
from legato.services.executor_service import ExecutorService
from legato.services.metrics_service import MetricsService
from legato.services.policy_service import PolicyService
from legato.services.report_service import ReportService
from legato.services.schedule_service import ScheduleService
from legato.services.storage_service import RunLayout, StorageService
from legato.services.task_service import TaskService
from legato.utils.dependencies import derive_rng
from legato.utils.exceptions import ConfigInvalidError, NoTracesError, OutputExistsError, StrategyMismatchError
from legato.utils.slug import cell_slug

logger = logging.getLogger(__name__)

CellJob = Tuple[TaskSpecSchema, ExecConfig, str]


@lru_cache(maxsize=8)
def _load_checkpoint(path: str, mtime_ns: int) -> CheckpointArtifact:
    return StorageService.load_checkpoint(path)


def _cached_checkpoint(path: str) -> CheckpointArtifact:
    """Un checkpoint por proceso; se relee si el archivo cambió"""
    if not Path(path).is_file():
        return StorageService.load_checkpoint(path)
    return _load_checkpoint(path, Path(path).stat().st_mtime_ns)


def run_cell(job: CellJob) -> ExecutionTrace:
    """
    Una celda de la grilla. Función de módulo para poder enviarse a otro proceso.
    El rng depende solo de (semilla, tarea): las estrategias comparten semilla pareada.
    """
    spec, cfg, checkpoint_path = job
    checkpoint = _cached_checkpoint(checkpoint_path)
    PolicyService.check_schedule_match(checkpoint, cfg.schedule.n_steps, cfg.schedule.H)
    net = checkpoint.to_net()
    rng = derive_rng(cfg.seed, "rollout", spec.name.value)
    return ExecutorService.run_episode(net, spec, cfg, rng)


class ExperimentService:

    # --- Datos y entrenamiento ---

    @staticmethod
    def prepare_dataset(config: RunConfigSchema, layout: RunLayout, force: bool = False) -> DatasetArtifact:
        """
        Dataset de la corrida: el indicado en la config, uno ya generado con los mismos
        parámetros, o uno nuevo.
        """
        spec = config.task
        if spec.dataset_path:
            dataset = StorageService.load_dataset(spec.dataset_path)
            if dataset.task != spec.name or dataset.horizon != spec.horizon:
                raise ConfigInvalidError(
                    f"el dataset {spec.dataset_path} es {dataset.task.value} con H={dataset.horizon}"
                )
            return dataset

        path = layout.dataset_path(spec.name)
        if path.exists() and not force:
            existing = StorageService.load_dataset(path)
            if existing.generator_params == spec.model_dump(mode="json"):
                logger.info(f"♻️  Reutilizando dataset {path}")
                return existing
            raise OutputExistsError(f"{path} existe con otros parámetros (usar --force)")

        dataset = TaskService.generate_dataset(spec, derive_rng(spec.seed, "dataset", spec.name.value))
        StorageService.save_dataset(dataset, path, force=True)
        return dataset

    @staticmethod
    def train_family(
        config: RunConfigSchema,
        family: StrategyFamily,
        dataset: DatasetArtifact,
        seed: Optional[int] = None,
    ) -> Tuple[CheckpointArtifact, pd.DataFrame]:
        cfg = config.train.model_copy(update={
            "family": family,
            "seed": config.train.seed if seed is None else seed,
        })
        PolicyService.training_dataset_check(dataset, cfg)

        rng = derive_rng(cfg.seed, "train", family.value)
        descriptor = PolicyService.descriptor_for(dataset.horizon, dataset.action_dim, dataset.obs_dim, cfg)
        net = PolicyService.init_net(descriptor, rng, family)
        curve = PolicyService.train(net, dataset, cfg, rng)

        checkpoint = PolicyService.to_checkpoint(
            net, dataset.task, cfg, steps_done=len(curve), final_loss=curve[-1] if curve else None
        )
        frame = pd.DataFrame({"step": range(1, len(curve) + 1), "loss": curve})
        return checkpoint, frame

    @staticmethod
    def train_all(
        config: RunConfigSchema,
        layout: RunLayout,
        force: bool = False,
        seed: Optional[int] = None,
    ) -> List[Path]:
        families = config.required_families()
        for family in families:
            for path in (layout.checkpoint_path(family), layout.curve_path(family)):
                if path.exists() and not force:
                    raise OutputExistsError(f"{path} ya existe (usar --force para sobreescribir)")

        dataset = ExperimentService.prepare_dataset(config, layout, force)
        written = []
        for family in families:
            checkpoint, curve = ExperimentService.train_family(config, family, dataset, seed)
            written.append(StorageService.save_checkpoint(checkpoint, layout.checkpoint_path(family), force))
            StorageService.save_csv(curve, layout.curve_path(family), force)
        return written

    # --- Grilla de ejecución ---

    @staticmethod
    def available_checkpoints(config: RunConfigSchema, layout: RunLayout) -> Dict[StrategyFamily, Path]:
        found = {family: layout.checkpoint_path(family) for family in StrategyFamily}
        found = {family: path for family, path in found.items() if path.exists()}
        for family, path in config.checkpoints.items():
            found[family] = Path(path)
        return found

    @staticmethod
    def checkpoint_for(strategy: Strategy, available: Dict[StrategyFamily, Path]) -> Path:
        """Primera familia compatible con la estrategia que tenga checkpoint"""
        for family in STRATEGY_FAMILIES[strategy]:
            if family in available:
                return available[family]
        allowed = ", ".join(f.value for f in STRATEGY_FAMILIES[strategy])
        raise StrategyMismatchError(f"no hay checkpoint ({allowed}) para la estrategia {strategy.value}")

    @staticmethod
    def sweep_executions(config: RunConfigSchema) -> List[ExecConfig]:
        """Celdas de la ablación (stride o retardo), todas con r + s + d = H"""
        sweep = config.sweep
        if sweep is None:
            raise ConfigInvalidError("la configuración no tiene sección 'sweep'")

        horizon, n_steps = config.task.horizon, config.train.n_steps
        if sweep.kind == "stride":
            specs = ScheduleService.rtc_grid(sweep.d, sweep.strides, horizon, n_steps)
        else:
            specs = ScheduleService.delay_grid(sweep.delays, sweep.s, horizon, n_steps)
        return [
            ExecConfig(
                strategy=strategy, schedule=spec, max_cycles=sweep.max_cycles, stop_at_goal=sweep.stop_at_goal
            )
            for strategy in sweep.strategies
            for spec in specs
        ]

    @staticmethod
    def plan_cells(executions: Sequence[ExecConfig], seeds: Sequence[int]) -> List[ExecConfig]:
        return [
            execution.model_copy(update={"seed": seed})
            for execution in executions
            for seed in seeds
        ]

    @staticmethod
    def trace_path(trace_dir: Path, cell: ExecConfig) -> Path:
        return Path(trace_dir) / f"{cell_slug(cell.strategy.value, cell.schedule.label, cell.seed)}.json"

    @staticmethod
    def run_grid(
        config: RunConfigSchema,
        layout: RunLayout,
        executions: Sequence[ExecConfig],
        seeds: Sequence[int],
        workers: int = 1,
        force: bool = False,
        trace_dir: Optional[Path] = None,
    ) -> List[Path]:
        """Corre todas las celdas; con workers > 1 en un pool de procesos"""
        cells = ExperimentService.plan_cells(executions, seeds)
        if not cells:
            logger.warning("⚠️  Grilla vacía: no hay semillas o ejecuciones")
            return []

        trace_dir = Path(trace_dir or layout.traces)
        paths = [ExperimentService.trace_path(trace_dir, cell) for cell in cells]
        for path in paths:
            if path.exists() and not force:
                raise OutputExistsError(f"{path} ya existe (usar --force para sobreescribir)")

        available = ExperimentService.available_checkpoints(config, layout)
        jobs: List[CellJob] = [
            (config.task, cell, str(ExperimentService.checkpoint_for(cell.strategy, available)))
            for cell in cells
        ]
        for _, cell, path in jobs:
            PolicyService.check_schedule_match(_cached_checkpoint(path), cell.schedule.n_steps, cell.schedule.H)

        logger.info(f"🚀 Ejecutando {len(jobs)} celdas con {workers} worker(s)")
        if workers > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                traces = list(pool.map(run_cell, jobs))
        else:
            traces = [run_cell(job) for job in jobs]

        for cell, trace, path in zip(cells, traces, paths):
            StorageService.save_trace(trace, path, force)
            logger.info(f"   {cell.label} seed={cell.seed}: {len(trace.cycles)} ciclos, meta={trace.reached_goal}")
        return paths

    # --- Métricas y reportes ---

    @staticmethod
    def load_traces(trace_dir: Path) -> List[ExecutionTrace]:
        traces = list(StorageService.iter_traces(trace_dir))
        if not traces:
            raise NoTracesError(f"no hay trazas en {trace_dir}")
        return traces

    @staticmethod
    def compute_metrics(trace_dir: Path, metrics_dir: Path, force: bool = False) -> List[MetricReport]:
        reports = []
        for path in StorageService.list_artifacts(trace_dir):
            report = MetricsService.compute_report(StorageService.load_trace(path))
            StorageService.save_artifact(report, Path(metrics_dir) / path.name, force)
            reports.append(report)
        if not reports:
            raise NoTracesError(f"no hay trazas en {trace_dir}")
        return reports

    @staticmethod
    def build_report(
        traces: Sequence[ExecutionTrace],
        reports_dir: Path,
        force: bool = False,
    ) -> Dict[str, pd.DataFrame]:
        """Escribe metrics.csv (por semilla), summary.csv (largo), sign_tests.csv y overlap_drift.csv"""
        if not traces:
            raise NoTracesError("no hay trazas para agregar")

        frame = ReportService.metrics_frame(MetricsService.compute_report(trace) for trace in traces)
        frames = {
            "metrics": frame,
            "summary": ReportService.aggregate(frame),
            "sign_tests": ReportService.sign_tests(frame),
            "overlap_drift": ReportService.drift_frame(traces),
        }
        reports_dir = Path(reports_dir)
        for name, table in frames.items():
            StorageService.save_csv(table, reports_dir / f"{name}.csv", force)
        return frames
