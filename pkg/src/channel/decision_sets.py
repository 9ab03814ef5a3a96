"""
Discrete decision sets: the finite lists of power vectors a transmitter can
choose among, and their CSV persistence.

Label convention: decision ``i`` (1-based) is row ``i - 1`` of
``DecisionSet.decisions``. The orderings below are fixed because neural
regression targets are label indices.
"""

from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Union
import numpy as np
import pandas as pd
from loguru import logger

from ..utils.csv_io import read_csv, write_csv


class Spacing(str, Enum):
    """Level spacing for single-channel power grids."""

    UNIFORM = "uniform"
    GEOMETRIC = "geometric"


@dataclass(frozen=True, eq=False)
class DecisionSet:
    """
    Ordered finite list of candidate power vectors.

    Attributes:
        decisions: Array of shape (M, N), row i-1 is decision i.
        p_max: Per-band power ceiling every component respects.
    """

    decisions: np.ndarray
    p_max: float

    def __post_init__(self):
        decisions = np.array(self.decisions, dtype=float)
        if decisions.ndim == 1:
            decisions = decisions[:, None]
        if decisions.ndim != 2 or decisions.shape[0] < 1:
            raise ValueError(f"decision set needs at least one decision, got shape {decisions.shape}")
        if np.any(decisions < 0) or np.any(decisions > self.p_max):
            raise ValueError(f"every decision component must lie in [0, {self.p_max}]")
        if len(np.unique(decisions, axis=0)) != len(decisions):
            raise ValueError("decisions must be distinct")
        decisions.setflags(write=False)
        object.__setattr__(self, "decisions", decisions)

    def __len__(self) -> int:
        return self.decisions.shape[0]

    def __eq__(self, other) -> bool:
        if not isinstance(other, DecisionSet):
            return NotImplemented
        return self.p_max == other.p_max and np.array_equal(self.decisions, other.decisions)

    @property
    def n_bands(self) -> int:
        return self.decisions.shape[1]

    @property
    def labels(self) -> np.ndarray:
        return np.arange(1, len(self) + 1)

    def power(self, label: Union[int, np.ndarray]) -> np.ndarray:
        """Power vector(s) for 1-based label(s)."""
        label = np.asarray(label)
        if np.any(label < 1) or np.any(label > len(self)):
            raise ValueError(f"labels must lie in 1..{len(self)}")
        return self.decisions[label - 1]

    def is_subset_of(self, other: "DecisionSet") -> bool:
        """True when every decision here also appears in ``other``."""
        theirs = {tuple(row) for row in other.decisions}
        return all(tuple(row) in theirs for row in self.decisions)

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame(self.decisions, columns=[f"p_{i + 1}" for i in range(self.n_bands)])
        frame.insert(0, "label", self.labels)
        return frame


def single_channel_grid(m: int, p_max: float, spacing: Spacing = Spacing.UNIFORM, ratio: float = 0.5) -> DecisionSet:
    """
    Strictly increasing single-channel power levels ending at ``p_max``.

    Uniform: P_i = p_max * i / M. Geometric: P_i = p_max * ratio**(M - i).
    """
    if m < 1:
        raise ValueError(f"M must be >= 1, got {m}")
    if not p_max > 0:
        raise ValueError(f"p_max must be > 0, got {p_max}")

    i = np.arange(1, m + 1)
    spacing = Spacing(spacing)
    if spacing is Spacing.UNIFORM:
        levels = p_max * i / m
    else:
        if not 0 < ratio < 1:
            raise ValueError(f"geometric ratio must lie in (0, 1), got {ratio}")
        levels = p_max * ratio ** (m - i).astype(float)

    return DecisionSet(levels[:, None], p_max)


def ee_pair_grid(m: int, p_max: float) -> DecisionSet:
    """
    Two-band EE decisions: all power on one band at level p_max * 2i / M.

    Ordered as every (x, 0) ascending, then every (0, x) ascending.
    """
    if m < 2 or m % 2:
        raise ValueError(f"M must be an even count >= 2, got {m}")
    if not p_max > 0:
        raise ValueError(f"p_max must be > 0, got {p_max}")

    half = m // 2
    levels = p_max * 2 * np.arange(1, half + 1) / m
    zeros = np.zeros(half)
    decisions = np.vstack([
        np.column_stack([levels, zeros]),
        np.column_stack([zeros, levels]),
    ])
    return DecisionSet(decisions, p_max)


def sr_simplex_grid(m: int, p_max: float) -> DecisionSet:
    """Two-band sum-rate decisions equispaced on p_1 + p_2 = p_max, corners included."""
    if m < 2:
        raise ValueError(f"M must be >= 2, got {m}")
    if not p_max > 0:
        raise ValueError(f"p_max must be > 0, got {p_max}")

    i = np.arange(1, m + 1)
    decisions = np.column_stack([
        p_max * (i - 1) / (m - 1),
        p_max * (m - i) / (m - 1),
    ])
    return DecisionSet(decisions, p_max)


def save_decision_set(ds: DecisionSet, path: Union[str, Path], meta: dict = None) -> Path:
    """Write ``label,p_1,...,p_N`` rows."""
    meta = dict(meta or {})
    meta.setdefault("p_max", repr(float(ds.p_max)))
    return write_csv(ds.to_frame(), path, meta)


def load_decision_set(path: Union[str, Path]) -> DecisionSet:
    frame, meta = read_csv(path)
    if "p_max" not in meta:
        raise ValueError(f"{path} has no p_max header line")
    columns = [c for c in frame.columns if c.startswith("p_")]
    frame = frame.sort_values("label")
    ds = DecisionSet(frame[columns].to_numpy(dtype=float), float(meta["p_max"]))
    logger.debug(f"Loaded {len(ds)} decisions from {path}")
    return ds
