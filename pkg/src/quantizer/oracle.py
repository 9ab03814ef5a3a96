"""
Ground truth for quantizer evaluation.

- brute-force optimal labels over a decision set,
- closed-form single-band EE maximizer and water-filling for sum-rate,
- the continuous optimum u*(g) over the feasible region, by closed form where
  one exists and by grid search with golden-section refinement otherwise.

Gains may be a single vector of shape (N,) or a batch of shape (n, N); batch
inputs return per-sample arrays.
"""

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional, Tuple, Union
import numpy as np
from loguru import logger

from ..channel.decision_sets import DecisionSet
from ..channel.model_core import (
    Scenario,
    Utility,
    ee_utility,
    efficiency,
    log_ee_utility,
    log_utility,
    sr_utility,
    utility,
)
from ..utils.errors import DimensionError

INV_PHI = (math.sqrt(5) - 1) / 2  # 1 / phi


class FeasibleRegion(str, Enum):
    """Power vectors the continuous optimum ranges over."""

    BOX = "box"          # [0, p_max]^N
    SIMPLEX = "simplex"  # sum(p) = p_max, p >= 0


@dataclass(frozen=True)
class OracleConfig:
    """
    Attributes:
        grid_points_per_dim: Grid resolution per band for grid searches.
        feasible_region: None selects the utility's natural region
            (box for EE, simplex for sum-rate).
        max_grid_size: Upper bound on points per grid search.
    """

    grid_points_per_dim: int = 1001
    feasible_region: Optional[FeasibleRegion] = None
    max_grid_size: int = 4_000_000

    def __post_init__(self):
        if self.grid_points_per_dim < 2:
            raise ValueError(f"grid_points_per_dim must be >= 2, got {self.grid_points_per_dim}")
        if self.feasible_region is not None:
            object.__setattr__(self, "feasible_region", FeasibleRegion(self.feasible_region))

    def region_for(self, scn: Scenario) -> FeasibleRegion:
        if self.feasible_region is not None:
            return self.feasible_region
        if scn.utility is Utility.ENERGY_EFFICIENCY:
            return FeasibleRegion.BOX
        return FeasibleRegion.SIMPLEX


def _as_batch(g, n_bands: int) -> Tuple[np.ndarray, bool]:
    g = np.asarray(g, dtype=float)
    single = g.ndim <= 1
    g = np.atleast_2d(g.reshape(-1) if g.ndim == 0 else g)
    if g.shape[-1] != n_bands:
        raise DimensionError(f"expected gain vectors with {n_bands} band(s), got shape {g.shape}")
    return g, single


def utility_matrix(gains: np.ndarray, ds: DecisionSet, scn: Scenario) -> np.ndarray:
    """Utility of every decision at every gain vector, shape (n, M)."""
    gains, _ = _as_batch(gains, scn.n_bands)
    if ds.n_bands != scn.n_bands:
        raise DimensionError(f"decision set has {ds.n_bands} band(s), scenario has {scn.n_bands}")
    return utility(ds.decisions[None, :, :], gains[:, None, :], scn)


def log_utility_matrix(gains: np.ndarray, ds: DecisionSet, scn: Scenario) -> np.ndarray:
    """log u(d_i; g) for every decision and gain vector, shape (n, M)."""
    gains, _ = _as_batch(gains, scn.n_bands)
    if ds.n_bands != scn.n_bands:
        raise DimensionError(f"decision set has {ds.n_bands} band(s), scenario has {scn.n_bands}")
    return log_utility(ds.decisions[None, :, :], gains[:, None, :], scn)


def oracle_labels(gains: np.ndarray, ds: DecisionSet, scn: Scenario) -> np.ndarray:
    """
    Smallest label attaining the best utility, for each gain vector.

    EE decisions are ranked by log utility: at small gains every
    exp(-c/SNR) underflows to 0 and the plain values would all tie.
    """
    if len(ds) == 0:
        raise ValueError("decision set is empty")
    if scn.utility is Utility.ENERGY_EFFICIENCY:
        return np.argmax(log_utility_matrix(gains, ds, scn), axis=1) + 1
    return np.argmax(utility_matrix(gains, ds, scn), axis=1) + 1


def oracle_label(g, ds: DecisionSet, scn: Scenario) -> int:
    """Smallest label attaining max_i u(d_i; g)."""
    return int(oracle_labels(np.asarray(g, dtype=float)[None, ...].reshape(1, -1), ds, scn)[0])


def discrete_best(gains: np.ndarray, ds: DecisionSet, scn: Scenario) -> np.ndarray:
    """Best utility reachable inside the decision set, per gain vector."""
    return np.max(utility_matrix(gains, ds, scn), axis=1)


def log_discrete_best(gains: np.ndarray, ds: DecisionSet, scn: Scenario) -> np.ndarray:
    return np.max(log_utility_matrix(gains, ds, scn), axis=1)


def ee_opt_power_1band(g: Union[float, np.ndarray], scn: Scenario) -> Union[float, np.ndarray]:
    """
    Maximizer of exp(-c*sigma^2/(p*g))/p over (0, p_max].

    The unconstrained stationary point is p* = c*sigma^2/g; the utility rises
    below it and falls above it, so clipping to p_max is exact.
    """
    g_arr = np.asarray(g, dtype=float)
    if np.any(~(g_arr > 0)):
        raise ValueError("channel gain must be > 0")
    if not scn.c > 0:
        raise ValueError("c must be > 0: with c = 0 the efficiency has no maximizer")
    p = np.minimum(scn.c * scn.noise_var / g_arr, scn.p_max)
    return p if p.ndim else float(p)


def _ee_1band_value(g: np.ndarray, scn: Scenario) -> np.ndarray:
    p = ee_opt_power_1band(g, scn)
    return efficiency(p * g / scn.noise_var, scn.c) / p


def _log_ee_1band_value(g: np.ndarray, scn: Scenario) -> np.ndarray:
    p = ee_opt_power_1band(g, scn)
    return -scn.c * scn.noise_var / (p * g) - np.log(p)


def waterfill_sr(g, scn: Scenario) -> np.ndarray:
    """
    Sum-rate optimal powers under sum(p) = p_max.

    p_i = max(0, mu - sigma^2/g_i); the water level mu is found by activating
    bands from the strongest down while the level stays above the next floor.
    """
    gains, single = _as_batch(g, scn.n_bands)
    if np.any(~(gains > 0)):
        raise ValueError("channel gains must be > 0")

    floors = scn.noise_var / gains
    order = np.argsort(floors, axis=1, kind="stable")
    sorted_floors = np.take_along_axis(floors, order, axis=1)

    k = np.arange(1, scn.n_bands + 1)
    levels = (scn.p_max + np.cumsum(sorted_floors, axis=1)) / k
    # Activation is a prefix property, so the active count is the number of True entries
    active = np.sum(levels > sorted_floors, axis=1)
    mu = levels[np.arange(len(gains)), active - 1]

    powers = np.maximum(0.0, mu[:, None] - floors)
    return powers[0] if single else powers


def golden_section_max(
    func: Callable[[np.ndarray], np.ndarray],
    lo: np.ndarray,
    hi: np.ndarray,
    tol: float = 1e-12,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Vectorized golden-section search for the maximum of unimodal functions.

    ``func`` maps an array of abscissae (one per problem) to values.

    Returns:
        (argmax, max) arrays.
    """
    a = np.asarray(lo, dtype=float).copy()
    b = np.asarray(hi, dtype=float).copy()
    width = float(np.max(b - a)) if a.size else 0.0
    if width <= tol:
        x = (a + b) / 2
        return x, func(x)

    n = int(math.ceil(math.log(tol / width) / math.log(INV_PHI)))

    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc = func(c)
    fd = func(d)

    for _ in range(n):
        left = fc >= fd
        a = np.where(left, a, c)
        b = np.where(left, d, b)
        keep_x = np.where(left, c, d)
        keep_f = np.where(left, fc, fd)
        h = b - a
        new_x = np.where(left, b - INV_PHI * h, a + INV_PHI * h)
        new_f = func(new_x)
        c = np.where(left, new_x, keep_x)
        d = np.where(left, keep_x, new_x)
        fc = np.where(left, new_f, keep_f)
        fd = np.where(left, keep_f, new_f)

    x = np.where(fc >= fd, c, d)
    return x, np.maximum(fc, fd)


def _refine_along_axis(gains: np.ndarray, base: np.ndarray, axis: np.ndarray, step: float,
                       scn: Scenario, simplex: bool) -> np.ndarray:
    """
    One golden-section pass around each grid winner along its winning axis.

    In the box only the winning component moves; on the two-band simplex the
    other component follows as p_max minus the winning one.
    """
    rows = np.arange(len(gains))
    centre = base[rows, axis]
    lo = np.clip(centre - step, 0.0, scn.p_max)
    hi = np.clip(centre + step, 0.0, scn.p_max)

    def along(x):
        p = base.copy()
        p[rows, axis] = x
        if simplex:
            p[rows, 1 - axis] = scn.p_max - x
        return ee_utility(p, gains, scn)

    _, best = golden_section_max(along, lo, hi)
    return best


def _ee_box_grid(gains: np.ndarray, scn: Scenario, cfg: OracleConfig) -> np.ndarray:
    k = cfg.grid_points_per_dim
    n_bands = scn.n_bands
    if k ** n_bands > cfg.max_grid_size:
        raise ValueError(
            f"box grid of {k}^{n_bands} points exceeds max_grid_size={cfg.max_grid_size}; "
            "lower grid_points_per_dim"
        )

    grid = np.linspace(0.0, scn.p_max, k)
    step = grid[1] - grid[0]
    shape = (k,) * n_bands

    # Total power on the grid does not depend on the sample
    denominator = np.zeros(shape)
    for band in range(n_bands):
        denominator = denominator + grid.reshape([k if i == band else 1 for i in range(n_bands)])
    nonzero = denominator > 0
    safe_denominator = np.where(nonzero, denominator, 1.0)

    best_points = np.empty((len(gains), n_bands))
    best_values = np.empty(len(gains))
    for i, g in enumerate(gains):
        success = efficiency(grid[None, :] * g[:, None] / scn.noise_var, scn.c)
        numerator = np.zeros(shape)
        for band in range(n_bands):
            numerator = numerator + success[band].reshape([k if j == band else 1 for j in range(n_bands)])
        values = np.where(nonzero, numerator / safe_denominator, 0.0)
        flat = int(np.argmax(values))
        best_values[i] = values.flat[flat]
        best_points[i] = grid[list(np.unravel_index(flat, shape))]

    axis = np.argmax(best_points, axis=1)
    refined = _refine_along_axis(gains, best_points, axis, step, scn, simplex=False)
    return np.maximum(best_values, refined)


def _ee_simplex_grid(gains: np.ndarray, scn: Scenario, cfg: OracleConfig) -> np.ndarray:
    if scn.n_bands == 1:
        return ee_utility(np.full((len(gains), 1), scn.p_max), gains, scn)
    if scn.n_bands != 2:
        raise ValueError("simplex grid search for EE supports at most two bands")

    grid = np.linspace(0.0, scn.p_max, cfg.grid_points_per_dim)
    step = grid[1] - grid[0]
    candidates = np.column_stack([grid, scn.p_max - grid])
    values = ee_utility(candidates[None, :, :], gains[:, None, :], scn)
    winner = np.argmax(values, axis=1)

    base = candidates[winner]
    refined = _refine_along_axis(gains, base, np.zeros(len(gains), dtype=int), step, scn, simplex=True)
    return np.maximum(values[np.arange(len(gains)), winner], refined)


def continuous_opt(g, scn: Scenario, cfg: OracleConfig = None) -> Union[float, np.ndarray]:
    """
    Best utility over the continuous feasible region, u*(g).

    EE on the box: the grid covers the whole box, then one golden-section pass
    refines the winner. The result is also bounded below by the closed-form
    all-power-on-one-band optimum, which is exact because EE is a
    power-weighted average of the per-band ratios f(SNR_i)/p_i.
    """
    cfg = cfg or OracleConfig()
    gains, single = _as_batch(g, scn.n_bands)
    if np.any(~(gains > 0)):
        raise ValueError("channel gains must be > 0")
    region = cfg.region_for(scn)

    if scn.utility is Utility.SUM_RATE:
        if region is FeasibleRegion.SIMPLEX:
            values = sr_utility(waterfill_sr(gains, scn), gains, scn)
        else:
            # Sum-rate increases in every p_i
            values = sr_utility(np.full_like(gains, scn.p_max), gains, scn)
    elif region is FeasibleRegion.BOX:
        on_one_band = np.max(_ee_1band_value(gains, scn), axis=1)
        if scn.n_bands == 1:
            values = on_one_band
        else:
            logger.debug(f"EE box grid search over {len(gains)} gain vector(s)")
            values = np.maximum(_ee_box_grid(gains, scn, cfg), on_one_band)
    else:
        values = _ee_simplex_grid(gains, scn, cfg)

    values = np.asarray(values, dtype=float)
    return float(values[0]) if single else values


def _log_ee_simplex_floor(gains: np.ndarray, scn: Scenario, cfg: OracleConfig) -> np.ndarray:
    if scn.n_bands == 1:
        return log_ee_utility(np.full((len(gains), 1), scn.p_max), gains, scn)
    grid = np.linspace(0.0, scn.p_max, cfg.grid_points_per_dim)
    candidates = np.column_stack([grid, scn.p_max - grid])
    return np.max(log_ee_utility(candidates[None, :, :], gains[:, None, :], scn), axis=1)


def log_continuous_opt(g, scn: Scenario, cfg: OracleConfig = None) -> Union[float, np.ndarray]:
    """
    log u*(g), finite for every positive gain vector.

    EE optima underflow to 0 once exp(-c*sigma^2/(p*g)) drops below the
    smallest double, around g < 3e-4 at the default constants. There the
    closed-form one-band optimum (box) or the best simplex grid point is
    evaluated directly in the log domain.
    """
    cfg = cfg or OracleConfig()
    gains, single = _as_batch(g, scn.n_bands)
    with np.errstate(divide="ignore"):
        values = np.log(np.atleast_1d(continuous_opt(gains, scn, cfg)))

    if scn.utility is Utility.ENERGY_EFFICIENCY:
        if cfg.region_for(scn) is FeasibleRegion.BOX:
            floor = np.max(_log_ee_1band_value(gains, scn), axis=1)
        else:
            floor = _log_ee_simplex_floor(gains, scn, cfg)
        values = np.maximum(values, floor)

    return float(values[0]) if single else values
