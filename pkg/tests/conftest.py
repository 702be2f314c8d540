"""
Fixtures compartidas: tarea reducida (H = 12), redes pequeñas y configuraciones de corrida
"""

import json

import numpy as np
import pytest

from legato.models.enums import Activation, Strategy, StrategyFamily, TaskName
from legato.models.policy import ArchitectureDescriptor, TrainConfig
from legato.models.schedule import ScheduleSpec
from legato.models.trace import ExecConfig
from legato.schemas.config_schema import TaskSpecSchema
from legato.services.policy_service import PolicyService

HORIZON = 12
N_STEPS = 5


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: experimentos de escritorio (entrenamiento incluido)")


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def reach_spec():
    return TaskSpecSchema(name=TaskName.BIMODAL_REACH, n_demos=256, horizon=HORIZON, noise_scale=0.0, seed=3)


@pytest.fixture
def pour_spec():
    return TaskSpecSchema(name=TaskName.OSCILLATING_POUR, n_demos=128, horizon=HORIZON, period=16, noise_scale=0.0)


@pytest.fixture
def small_train_config():
    return TrainConfig(
        family=StrategyFamily.LEGATO,
        learning_rate=3e-3,
        batch_size=32,
        steps=20,
        d_range=(0, 3),
        r_range=(0, 6),
        n_steps=N_STEPS,
        hidden_sizes=[32, 32],
        time_embedding_dim=2,
        log_every=10,
    )


@pytest.fixture
def small_descriptor():
    return ArchitectureDescriptor(horizon=HORIZON, action_dim=2, obs_dim=2, hidden_sizes=[32, 32], time_embedding_dim=2)


@pytest.fixture
def make_net(small_descriptor):
    def factory(family=StrategyFamily.LEGATO, seed=0, activation=Activation.TANH):
        descriptor = small_descriptor.model_copy(update={"activation": activation})
        return PolicyService.init_net(descriptor, np.random.default_rng(seed), family)

    return factory


@pytest.fixture
def exec_config():
    def factory(strategy=Strategy.LEGATO, d=2, s=6, r=4, max_cycles=4, seed=0, stop_at_goal=False):
        return ExecConfig(
            strategy=strategy,
            schedule=ScheduleSpec(d=d, r=r, s=s, H=HORIZON, n_steps=N_STEPS),
            max_cycles=max_cycles,
            seed=seed,
            stop_at_goal=stop_at_goal,
        )

    return factory


@pytest.fixture
def run_config_file(tmp_path):
    """Escribe un JSON de corrida mínimo y devuelve (ruta, dict)"""

    def factory(**overrides):
        raw = {
            "name": "prueba rapida",
            "task": {"name": "bimodal_reach", "n_demos": 64, "horizon": HORIZON, "seed": 1},
            "train": {
                "steps": 3,
                "batch_size": 16,
                "d_range": [0, 3],
                "r_range": [0, 6],
                "n_steps": N_STEPS,
                "hidden_sizes": [16],
                "time_embedding_dim": 1,
            },
            "executions": [
                {"strategy": "legato", "schedule": {"d": 2, "r": 4, "s": 6, "H": HORIZON, "n_steps": N_STEPS}, "max_cycles": 3, "stop_at_goal": False},
                {"strategy": "rtc_soft", "schedule": {"d": 2, "r": 4, "s": 6, "H": HORIZON, "n_steps": N_STEPS}, "max_cycles": 3, "stop_at_goal": False},
            ],
            "seeds": [0, 1],
            "output_dir": str(tmp_path / "runs"),
        }
        raw.update(overrides)
        path = tmp_path / "run.json"
        path.write_text(json.dumps(raw), encoding="utf-8")
        return path, raw

    return factory
