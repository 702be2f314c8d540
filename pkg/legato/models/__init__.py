"""
Modelos de dominio y artefactos persistidos
"""

from .enums import (
    Strategy,
    StrategyFamily,
    TaskName,
    Activation,
    ArtifactKind,
    CutoffRule,
    STRATEGY_FAMILIES,
)
from .base import BaseArtifact, PackedArray
from .schedule import ScheduleParams, GuidanceSchedule, ScheduleSpec
from .chunk import Chunk, DenoiseState
from .policy import TrainConfig, ArchitectureDescriptor, PolicyNet, CheckpointArtifact, TrainingBatch
from .task import EnvState, Demonstration, DatasetArtifact
from .trace import ExecConfig, CycleRecord, ExecutionTrace
from .metric import MotionBlock, CommandStream, MetricReport, SignTestResult
from .oracle import CheckResult

__all__ = [
    "Strategy",
    "StrategyFamily",
    "TaskName",
    "Activation",
    "ArtifactKind",
    "CutoffRule",
    "STRATEGY_FAMILIES",
    "BaseArtifact",
    "PackedArray",
    "ScheduleParams",
    "GuidanceSchedule",
    "ScheduleSpec",
    "Chunk",
    "DenoiseState",
    "TrainConfig",
    "ArchitectureDescriptor",
    "PolicyNet",
    "CheckpointArtifact",
    "TrainingBatch",
    "EnvState",
    "Demonstration",
    "DatasetArtifact",
    "ExecConfig",
    "CycleRecord",
    "ExecutionTrace",
    "MotionBlock",
    "CommandStream",
    "MetricReport",
    "SignTestResult",
    "CheckResult",
]
