"""
Run configuration loader.

A run is described by one JSON document:

    {
      "scenario": {"n_bands": 2, "p_max": 5.0, "noise_var": 1.0, "c": 1.0, "utility": "ee"},
      "sweep":    {"m": 8, "m_values": [2, 4, 8, 16, 32, 64], "seeds": [0, 1, 2], ...},
      "train":    {"learning_rate": 0.05, "epochs": 500, ...},
      "oracle":   {"grid_points_per_dim": 1001, "feasible_region": null, "baseline": "continuous"},
      "output_dir": "results"
    }

Every block is optional and falls back to the defaults below. Unknown keys
anywhere are rejected.
"""

import hashlib
import json
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path
from typing import List, Optional, Tuple, Union
from loguru import logger

from ..channel.decision_sets import Spacing
from ..channel.model_core import Scenario, Utility
from ..quantizer.neural_quantizer import TrainConfig
from ..quantizer.oracle import FeasibleRegion, OracleConfig
from ..utils.config import config as env_config
from ..utils.errors import ConfigError
from .evaluation import Baseline, LabelerKind, SweepSettings, decision_set_for

TOP_LEVEL_KEYS = {"scenario", "sweep", "train", "oracle", "output_dir"}


@dataclass(frozen=True)
class SweepBlock:
    """
    Attributes:
        m: Decision count used by gen-data, design, train and eval.
        m_values: Decision counts swept by the sweep command.
        seeds: Base seeds, one replicate each.
        n_samples: Gain vectors drawn per replicate.
        train_fraction: Share of samples used for training.
        labelers: Labeler kinds the sweep evaluates.
        utilities: Utilities the sweep covers; the scenario block supplies the rest.
        sigmas: Loss targets, in percent, of the compression-rate table.
        reference_sigma: Loss target, in percent, whose M is the reference.
        gamma_labeler: Labeler whose losses feed the compression-rate table.
        spacing: Level spacing for single-band grids.
    """

    m: int = 8
    m_values: Tuple[int, ...] = (2, 4, 8, 16, 32, 64)
    seeds: Tuple[int, ...] = (0, 1, 2)
    n_samples: int = 10000
    train_fraction: float = 0.9
    labelers: Tuple[str, ...] = ("oracle", "nn")
    utilities: Tuple[str, ...] = ("ee", "sr")
    sigmas: Tuple[float, ...] = (0.25, 0.5, 1.0, 2.0, 4.0, 8.0)
    reference_sigma: float = 1.0
    gamma_labeler: str = "nn"
    spacing: str = "uniform"

    @property
    def settings(self) -> SweepSettings:
        return SweepSettings(
            n_samples=self.n_samples,
            train_fraction=self.train_fraction,
            spacing=Spacing(self.spacing),
        )


def _check_keys(block: dict, allowed, where: str):
    if not isinstance(block, dict):
        raise ConfigError(f"'{where}' must be a JSON object")
    unknown = sorted(set(block) - set(allowed))
    if unknown:
        raise ConfigError(f"unknown key(s) in '{where}': {', '.join(unknown)}")


def _field_names(cls) -> List[str]:
    return [f.name for f in fields(cls)]


class RunConfig:
    """Validated run configuration for every CLI command."""

    def __init__(self, raw: dict = None, source: Optional[str] = None):
        raw = {} if raw is None else raw
        self.source = source
        _check_keys(raw, TOP_LEVEL_KEYS, "config")

        try:
            self.scenario = self._build_scenario(raw.get("scenario", {}))
            self.sweep = self._build_sweep(raw.get("sweep", {}))
            self.train = self._build_train(raw.get("train", {}))
            self.oracle, self.baseline = self._build_oracle(raw.get("oracle", {}))
        except ConfigError:
            raise
        except (TypeError, ValueError) as e:
            raise ConfigError(f"invalid configuration: {e}") from e

        self.output_dir = str(raw.get("output_dir", env_config.output_dir))
        self._check_decision_sets()

    @classmethod
    def from_file(cls, path: Union[str, Path]) -> "RunConfig":
        """Load and validate a JSON configuration file."""
        try:
            with open(path, "r") as f:
                raw = json.load(f)
        except FileNotFoundError:
            raise ConfigError(f"configuration file {path} not found")
        except json.JSONDecodeError as e:
            raise ConfigError(f"invalid JSON in configuration file {path}: {e}")
        logger.info(f"Loaded configuration from {path}")
        return cls(raw, source=str(path))

    @staticmethod
    def _build_scenario(block: dict) -> Scenario:
        _check_keys(block, _field_names(Scenario), "scenario")
        values = dict(block)
        for key in ("p_max", "noise_var", "c"):
            if key in values:
                values[key] = float(values[key])
        if "utility" in values:
            values["utility"] = Utility(values["utility"])
        return Scenario(**values)

    @staticmethod
    def _build_sweep(block: dict) -> SweepBlock:
        _check_keys(block, _field_names(SweepBlock), "sweep")
        values = {k: tuple(v) if isinstance(v, list) else v for k, v in block.items()}
        sweep = SweepBlock(**values)

        if sweep.m < 1:
            raise ConfigError(f"sweep.m must be >= 1, got {sweep.m}")
        if any(b <= a for a, b in zip(sweep.m_values, sweep.m_values[1:])):
            raise ConfigError(f"sweep.m_values must be strictly increasing, got {list(sweep.m_values)}")
        if not sweep.seeds:
            raise ConfigError("sweep.seeds must list at least one seed")
        if any(int(s) != s or s < 0 for s in sweep.seeds):
            raise ConfigError(f"sweep.seeds must be non-negative integers, got {list(sweep.seeds)}")
        if sweep.n_samples < 2:
            raise ConfigError(f"sweep.n_samples must be >= 2, got {sweep.n_samples}")
        if not 0 < sweep.train_fraction < 1:
            raise ConfigError(f"sweep.train_fraction must lie in (0, 1), got {sweep.train_fraction}")
        if any(s <= 0 for s in sweep.sigmas) or sweep.reference_sigma <= 0:
            raise ConfigError("loss targets must be > 0")
        for kind in sweep.labelers + (sweep.gamma_labeler,):
            LabelerKind(kind)
        for name in sweep.utilities:
            Utility(name)
        Spacing(sweep.spacing)
        return sweep

    @staticmethod
    def _build_train(block: dict) -> TrainConfig:
        # Initial weights come from the seed list, not from this block
        _check_keys(block, [n for n in _field_names(TrainConfig) if n != "seed"], "train")
        return TrainConfig(**block)

    @staticmethod
    def _build_oracle(block: dict) -> Tuple[OracleConfig, Baseline]:
        _check_keys(block, _field_names(OracleConfig) + ["baseline"], "oracle")
        values = dict(block)
        baseline = Baseline(values.pop("baseline", Baseline.CONTINUOUS.value))
        if values.get("feasible_region") is not None:
            values["feasible_region"] = FeasibleRegion(values["feasible_region"])
        return OracleConfig(**values), baseline

    def _check_decision_sets(self):
        # Fail before any work if a configured M has no grid for its utility
        for utility in set(self.sweep_utilities()) | {self.scenario.utility}:
            scn = self.scenario_for(utility)
            for m in sorted(set(self.sweep.m_values) | {self.sweep.m}):
                try:
                    decision_set_for(scn, m, Spacing(self.sweep.spacing))
                except ValueError as e:
                    raise ConfigError(f"M={m} is not valid for utility '{utility.value}': {e}") from e

    def sweep_utilities(self) -> List[Utility]:
        return [Utility(name) for name in self.sweep.utilities] or [self.scenario.utility]

    def scenario_for(self, utility: Utility) -> Scenario:
        return replace(self.scenario, utility=Utility(utility))

    def seeds_for(self, override: Optional[int] = None) -> List[int]:
        """Base seeds of the run, or the single ``--seed`` override."""
        return [int(override)] if override is not None else [int(s) for s in self.sweep.seeds]

    def with_output_dir(self, output_dir: Optional[str]) -> "RunConfig":
        if output_dir is None:
            return self
        updated = self.to_dict()
        updated["output_dir"] = str(output_dir)
        return RunConfig(updated, source=self.source)

    def to_dict(self) -> dict:
        """Canonical, fully-populated form of the configuration."""
        oracle = asdict(self.oracle)
        oracle["feasible_region"] = None if self.oracle.feasible_region is None else self.oracle.feasible_region.value
        oracle["baseline"] = self.baseline.value
        train = asdict(self.train)
        train.pop("seed")
        sweep = {k: list(v) if isinstance(v, tuple) else v for k, v in asdict(self.sweep).items()}
        return {
            "scenario": self.scenario.to_dict(),
            "sweep": sweep,
            "train": train,
            "oracle": oracle,
            "output_dir": self.output_dir,
        }

    @property
    def config_hash(self) -> str:
        """sha256 prefix of the canonical configuration, embedded in every CSV."""
        settings = self.to_dict()
        # Where results land does not change them
        settings.pop("output_dir")
        text = json.dumps(settings, sort_keys=True)
        return hashlib.sha256(text.encode("utf-8")).hexdigest()[:16]
