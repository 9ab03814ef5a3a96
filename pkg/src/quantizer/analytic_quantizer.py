"""
Closed-form single-channel quantizer for the energy-efficiency utility.

For one band, u(P; g) = exp(-c*sigma^2 / (P*g)) / P. Two power levels
P_lo < P_hi give equal utility at the transition gain

    g0(P_lo, P_hi) = c*sigma^2 * (1/P_lo - 1/P_hi) / ln(P_hi / P_lo)

Above it the lower power wins. Adjacent transition gains strictly decrease
along an increasing level grid, so the M-1 adjacent thresholds partition
(0, inf) into M non-empty cells: the highest gains map to P_1 and the
lowest gains map to P_M.
"""

import math
from dataclasses import dataclass
from pathlib import Path
from typing import List, Tuple, Union
import numpy as np
import pandas as pd
from loguru import logger

from ..channel.decision_sets import DecisionSet
from ..channel.model_core import Scenario, Utility
from ..utils.csv_io import read_csv, write_csv
from ..utils.errors import UnsupportedAnalyticalCaseError


def transition_level(p_lo: float, p_hi: float, c: float, noise_var: float) -> float:
    """
    Gain at which the two power levels have identical energy efficiency.

    Raises:
        ValueError: If p_lo >= p_hi, any input is nonpositive, or c == 0.
    """
    if not (p_lo > 0 and p_hi > 0 and noise_var > 0):
        raise ValueError(f"powers and noise_var must be > 0, got p_lo={p_lo}, p_hi={p_hi}, noise_var={noise_var}")
    if not p_lo < p_hi:
        raise ValueError(f"p_lo must be < p_hi, got p_lo={p_lo}, p_hi={p_hi}")
    if c == 0:
        raise ValueError("c = 0 has no transition level: the smaller power always wins")
    if not c > 0:
        raise ValueError(f"c must be > 0, got {c}")

    step = (p_hi - p_lo) / p_lo
    # (1/P_lo - 1/P_hi) / ln(P_hi/P_lo), written to stay accurate for close levels
    return c * noise_var * step / (p_hi * math.log1p(step))


@dataclass(frozen=True, eq=False)
class ScalarPartition:
    """
    Interval partition of the gain axis with its cell -> power mapping.

    Attributes:
        levels: Strictly increasing power levels P_1 < ... < P_M; label i is P_i.
        thresholds: t_i = g0(P_i, P_{i+1}) for i = 1..M-1, strictly decreasing.
    """

    levels: np.ndarray
    thresholds: np.ndarray

    def __len__(self) -> int:
        return len(self.levels)

    def cells(self) -> List[Tuple[float, float, int, float]]:
        """
        The mapping Phi as (lower gain, upper gain, label, power) rows,
        ordered by increasing gain.
        """
        bounds = np.concatenate([[0.0], self.thresholds[::-1], [math.inf]])
        rows = []
        for k in range(len(self.levels)):
            label = len(self.levels) - k
            rows.append((float(bounds[k]), float(bounds[k + 1]), label, float(self.levels[label - 1])))
        return rows

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({
            "threshold_index": np.arange(1, len(self.thresholds) + 1, dtype=int),
            "gain_threshold": self.thresholds,
        })


def build_partition(levels: DecisionSet, scn: Scenario) -> ScalarPartition:
    """
    Build the decision-optimal partition for a single-channel level grid.

    Raises:
        UnsupportedAnalyticalCaseError: For more than one band or the sum-rate utility.
        ValueError: If levels are not strictly increasing and positive, or c == 0.
    """
    if scn.utility is not Utility.ENERGY_EFFICIENCY:
        raise UnsupportedAnalyticalCaseError(
            "the closed-form partition exists only for the energy-efficiency utility; "
            "use the neural quantizer for sum-rate"
        )
    if scn.n_bands != 1 or levels.n_bands != 1:
        raise UnsupportedAnalyticalCaseError(
            "the closed-form partition exists only for a single band; "
            "use the neural quantizer for N > 1"
        )

    powers = levels.decisions[:, 0].copy()
    if np.any(powers <= 0) or np.any(np.diff(powers) <= 0):
        raise ValueError("single-channel levels must be positive and strictly increasing")

    thresholds = np.array([
        transition_level(powers[i], powers[i + 1], scn.c, scn.noise_var)
        for i in range(len(powers) - 1)
    ], dtype=float)

    powers.setflags(write=False)
    thresholds.setflags(write=False)
    logger.debug(f"Built partition with {len(powers)} cells")
    return ScalarPartition(levels=powers, thresholds=thresholds)


def quantize(part: ScalarPartition, g: Union[float, np.ndarray]) -> Union[int, np.ndarray]:
    """
    Label of the cell containing each gain.

    A gain exactly on a threshold resolves to the lower-power cell.
    """
    g_arr = np.asarray(g, dtype=float)
    if np.any(~(g_arr > 0)):
        raise ValueError("channel gains must be > 0")

    # label = 1 + #{thresholds strictly above g}
    ascending = part.thresholds[::-1]
    above = len(ascending) - np.searchsorted(ascending, g_arr, side="right")
    labels = 1 + above
    return labels if labels.ndim else int(labels)


def save_partition(part: ScalarPartition, path: Union[str, Path], meta: dict = None) -> Path:
    """Write threshold rows with the level grid in the header block."""
    header = {"levels": ",".join(repr(float(p)) for p in part.levels)}
    header.update(meta or {})
    return write_csv(part.to_frame(), path, header)


def load_partition(path: Union[str, Path]) -> ScalarPartition:
    frame, meta = read_csv(path)
    if "levels" not in meta:
        raise ValueError(f"{path} has no levels header line")
    levels = np.array([float(v) for v in meta["levels"].split(",")], dtype=float)
    thresholds = frame.sort_values("threshold_index")["gain_threshold"].to_numpy(dtype=float)
    if len(thresholds) != len(levels) - 1:
        raise ValueError(f"{path}: {len(levels)} levels need {len(levels) - 1} thresholds, found {len(thresholds)}")
    return ScalarPartition(levels=levels, thresholds=thresholds)
