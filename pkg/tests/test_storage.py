"""
Tests de persistencia de artefactos y del layout de corrida
"""

import json

import numpy as np
import pandas as pd
import pytest

from legato.config import settings
from legato.models.enums import StrategyFamily, TaskName
from legato.models.policy import TrainConfig
from legato.services.executor_service import ExecutorService
from legato.services.policy_service import PolicyService
from legato.services.storage_service import RUN_SUBDIRS, RunLayout, StorageService
from legato.services.task_service import TaskService
from legato.utils.exceptions import (
    ArtifactFormatError,
    CheckpointMismatchError,
    InvalidParamsError,
    OutputExistsError,
)
from legato.utils.slug import cell_slug, generate_slug


def test_dataset_round_trip_is_bit_exact(tmp_path, reach_spec):
    dataset = TaskService.generate_dataset(reach_spec, np.random.default_rng(0))
    path = StorageService.save_dataset(dataset, tmp_path / "reach.json")
    loaded = StorageService.load_dataset(path)

    assert np.array_equal(loaded.chunks, dataset.chunks)
    assert loaded.chunks.tobytes() == dataset.chunks.tobytes()
    assert loaded.modes == dataset.modes
    assert loaded.generator_params == dataset.generator_params

    again = StorageService.save_dataset(loaded, tmp_path / "again.json")
    assert again.read_bytes() == path.read_bytes()


def test_trace_round_trip(tmp_path, make_net, reach_spec, exec_config):
    trace = ExecutorService.run_episode(make_net(), reach_spec, exec_config(), np.random.default_rng(0), seed=0)
    path = StorageService.save_trace(trace, tmp_path / "trace.json")
    loaded = StorageService.load_trace(path)
    assert np.array_equal(loaded.stream, trace.stream)
    assert loaded.boundary_indices == trace.boundary_indices
    assert [c.drift for c in loaded.cycles] == [c.drift for c in trace.cycles]
    assert loaded.cycles[0].reference is None


def test_existing_output_needs_force(tmp_path, reach_spec):
    dataset = TaskService.generate_dataset(reach_spec, np.random.default_rng(0))
    path = StorageService.save_dataset(dataset, tmp_path / "reach.json")
    with pytest.raises(OutputExistsError):
        StorageService.save_dataset(dataset, path)
    StorageService.save_dataset(dataset, path, force=True)


def test_tampered_artifact_rejected(tmp_path, reach_spec):
    dataset = TaskService.generate_dataset(reach_spec, np.random.default_rng(0))
    path = StorageService.save_dataset(dataset, tmp_path / "reach.json")
    raw = json.loads(path.read_text())
    raw["seed"] = raw["seed"] + 1
    path.write_text(json.dumps(raw))
    with pytest.raises(ArtifactFormatError):
        StorageService.load_dataset(path)


def test_other_format_version_rejected(tmp_path, reach_spec):
    dataset = TaskService.generate_dataset(reach_spec, np.random.default_rng(0))
    dataset.format_version = settings.FORMAT_VERSION + 1
    path = StorageService.save_dataset(dataset, tmp_path / "reach.json")
    with pytest.raises(ArtifactFormatError):
        StorageService.load_dataset(path)


def test_unreadable_artifact_rejected(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    with pytest.raises(ArtifactFormatError):
        StorageService.load_dataset(path)
    with pytest.raises(ArtifactFormatError):
        StorageService.load_dataset(tmp_path / "missing.json")


def test_checkpoint_round_trip_and_mismatch(tmp_path, make_net, small_descriptor):
    net = make_net()
    checkpoint = PolicyService.to_checkpoint(net, TaskName.BIMODAL_REACH, TrainConfig(), steps_done=0)
    path = StorageService.save_checkpoint(checkpoint, tmp_path / "legato.json")

    loaded = StorageService.load_checkpoint(path, small_descriptor)
    assert loaded.theta.tobytes() == net.theta.tobytes()
    assert loaded.family == StrategyFamily.LEGATO

    with pytest.raises(CheckpointMismatchError):
        StorageService.load_checkpoint(path, small_descriptor.model_copy(update={"horizon": 10}))

    path.write_text("[]")
    with pytest.raises(CheckpointMismatchError):
        StorageService.load_checkpoint(path)


def test_run_layout(tmp_path):
    layout = RunLayout.for_run(tmp_path, "Prueba Rápida 01").ensure()
    assert layout.root == tmp_path / "prueba-rapida-01"
    for name in RUN_SUBDIRS:
        assert (layout.root / name).is_dir()
    assert layout.checkpoint_path(StrategyFamily.VANILLA).name == "vanilla.json"
    assert layout.sweep_dir("stride").name == "sweep_stride"


@pytest.mark.parametrize("name, expected", [
    ("Prueba Rápida #01", "prueba-rapida-01"),
    ("  ¡Ñandú!  ", "nandu"),
    ("###", "corrida"),
    ("x" * 80 + " final", "x" * 64),
])
def test_run_slug(name, expected):
    assert generate_slug(name) == expected


def test_cell_slug_orders_like_the_grid():
    names = [cell_slug("rtc_soft", "d2-s6-r4", seed) for seed in (10, 2, 1)]
    assert names[0] == "rtc-soft__d2-s6-r4__seed010"
    assert sorted(names) == [names[2], names[1], names[0]]
    with pytest.raises(InvalidParamsError):
        cell_slug("legato", "d2-s6-r4", -1)
    with pytest.raises(InvalidParamsError):
        cell_slug("", "d2-s6-r4", 0)


def test_csv_keeps_full_precision(tmp_path):
    frame = pd.DataFrame({"value": [1.0 / 3.0]})
    path = StorageService.save_csv(frame, tmp_path / "values.csv")
    assert pd.read_csv(path)["value"].iloc[0] == 1.0 / 3.0
    assert StorageService.list_artifacts(tmp_path) == []
