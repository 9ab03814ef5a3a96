"""Shared fixtures for the toolkit tests."""

import json

import numpy as np
import pytest

from src.channel.model_core import Scenario, Utility
from src.quantizer.neural_quantizer import TrainConfig
from src.quantizer.oracle import OracleConfig


@pytest.fixture
def ee_one_band():
    return Scenario(n_bands=1, p_max=5.0, noise_var=1.0, c=1.0, utility=Utility.ENERGY_EFFICIENCY)


@pytest.fixture
def ee_two_band():
    return Scenario(n_bands=2, p_max=5.0, noise_var=1.0, c=1.0, utility=Utility.ENERGY_EFFICIENCY)


@pytest.fixture
def sr_two_band():
    return Scenario(n_bands=2, p_max=5.0, noise_var=1.0, c=1.0, utility=Utility.SUM_RATE)


@pytest.fixture
def coarse_oracle():
    return OracleConfig(grid_points_per_dim=101)


@pytest.fixture
def quick_train():
    return TrainConfig(epochs=10, log_every=5)


@pytest.fixture
def rng():
    return np.random.Generator(np.random.Philox(12345))


@pytest.fixture
def small_config():
    """A run configuration small enough for end-to-end command tests."""
    return {
        "scenario": {"n_bands": 2, "p_max": 5.0, "noise_var": 1.0, "c": 1.0, "utility": "ee"},
        "sweep": {
            "m": 4,
            "m_values": [2, 4],
            "seeds": [0],
            "n_samples": 200,
            "train_fraction": 0.9,
            "labelers": ["oracle", "nn"],
            "utilities": ["ee", "sr"],
            "sigmas": [1.0, 5.0, 50.0],
        },
        "train": {"epochs": 5, "log_every": 5},
        "oracle": {"grid_points_per_dim": 51},
    }


@pytest.fixture
def write_config(tmp_path):
    """Write a config dict to a JSON file and return its path."""
    def _write(raw: dict, name: str = "config.json"):
        path = tmp_path / name
        path.write_text(json.dumps(raw))
        return str(path)
    return _write
