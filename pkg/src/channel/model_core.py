"""
Link model: scenario constants, SNR, packet-success efficiency and the two
utilities (energy efficiency and sum-rate).

All functions accept scalars or numpy arrays. Power and gain vectors keep
their bands on the last axis, so a stack of gain vectors of shape ``(n, N)``
broadcasts against a stack of decisions of shape ``(M, N)`` once the caller
inserts the matching singleton axes.
"""

from dataclasses import dataclass, asdict
from enum import Enum
from typing import Union
import numpy as np

from ..utils.errors import DimensionError

ArrayLike = Union[float, np.ndarray]


class Utility(str, Enum):
    """Utility the transmitter maximizes."""

    ENERGY_EFFICIENCY = "ee"
    SUM_RATE = "sr"


@dataclass(frozen=True)
class Scenario:
    """
    Physical constants of the link.

    Attributes:
        n_bands: Number of bands N.
        p_max: Maximum transmit power in mW.
        noise_var: Received noise variance in mW.
        c: Spectral-efficiency constant of the efficiency function.
        utility: Which utility decisions are judged by.
    """

    n_bands: int = 2
    p_max: float = 5.0
    noise_var: float = 1.0
    c: float = 1.0
    utility: Utility = Utility.ENERGY_EFFICIENCY

    def __post_init__(self):
        if int(self.n_bands) != self.n_bands or self.n_bands < 1:
            raise ValueError(f"n_bands must be a positive integer, got {self.n_bands}")
        if not self.p_max > 0:
            raise ValueError(f"p_max must be > 0, got {self.p_max}")
        if not self.noise_var > 0:
            raise ValueError(f"noise_var must be > 0, got {self.noise_var}")
        if not self.c >= 0:
            raise ValueError(f"c must be >= 0, got {self.c}")
        # Accept the enum value ("ee"/"sr") as well as the member
        object.__setattr__(self, "utility", Utility(self.utility))

    def to_dict(self) -> dict:
        data = asdict(self)
        data["utility"] = self.utility.value
        return data


def snr(p: ArrayLike, g: ArrayLike, noise_var: float) -> ArrayLike:
    """Signal-to-noise ratio p*g/noise_var."""
    if not noise_var > 0:
        raise ValueError(f"noise_var must be > 0, got {noise_var}")
    return np.multiply(p, g) / noise_var


def efficiency(s: ArrayLike, c: float) -> ArrayLike:
    """
    Packet success rate f(s) = exp(-c/s).

    Extended by continuity at s = 0: 0 when c > 0, 1 when c = 0.
    """
    s_arr = np.asarray(s, dtype=float)
    if c == 0:
        out = np.ones_like(s_arr)
    else:
        out = np.zeros_like(s_arr)
        positive = s_arr > 0
        out[positive] = np.exp(-c / s_arr[positive])
    return out if out.ndim else float(out)


def _check_bands(p: np.ndarray, g: np.ndarray, n_bands: int):
    if p.shape[-1:] != (n_bands,) or g.shape[-1:] != (n_bands,):
        raise DimensionError(
            f"expected {n_bands} band(s), got power shape {p.shape} and gain shape {g.shape}"
        )


def ee_utility(p: ArrayLike, g: ArrayLike, scn: Scenario) -> ArrayLike:
    """
    Energy efficiency sum_i f(SNR_i) / sum_i p_i in 1/mW.

    Zero total power evaluates to 0, the limit of the ratio as p -> 0.
    """
    p = np.asarray(p, dtype=float)
    g = np.asarray(g, dtype=float)
    _check_bands(p, g, scn.n_bands)

    success = efficiency(snr(p, g, scn.noise_var), scn.c)
    numerator = np.sum(success, axis=-1)
    total = np.sum(np.broadcast_to(p, np.broadcast_shapes(p.shape, g.shape)), axis=-1)

    safe_total = np.where(total > 0, total, 1.0)
    out = np.where(total > 0, numerator / safe_total, 0.0)
    return out if out.ndim else float(out)


def sr_utility(p: ArrayLike, g: ArrayLike, scn: Scenario) -> ArrayLike:
    """Sum-rate sum_i ln(1 + SNR_i) in nats."""
    p = np.asarray(p, dtype=float)
    g = np.asarray(g, dtype=float)
    _check_bands(p, g, scn.n_bands)

    out = np.sum(np.log1p(snr(p, g, scn.noise_var)), axis=-1)
    return out if np.ndim(out) else float(out)


def utility(p: ArrayLike, g: ArrayLike, scn: Scenario) -> ArrayLike:
    """Evaluate the scenario's configured utility."""
    if scn.utility is Utility.ENERGY_EFFICIENCY:
        return ee_utility(p, g, scn)
    return sr_utility(p, g, scn)


def log_ee_utility(p: ArrayLike, g: ArrayLike, scn: Scenario) -> ArrayLike:
    """
    Natural log of the energy efficiency, finite where the utility underflows.

    The numerator is a log-sum-exp over the exponents -c/SNR_i, with
    zero-power bands contributing -inf. Zero total power gives -inf.
    """
    p = np.asarray(p, dtype=float)
    g = np.asarray(g, dtype=float)
    _check_bands(p, g, scn.n_bands)

    s = np.asarray(snr(p, g, scn.noise_var), dtype=float)
    if scn.c == 0:
        exponents = np.zeros_like(s)
    else:
        safe_s = np.where(s > 0, s, 1.0)
        exponents = np.where(s > 0, -scn.c / safe_s, -np.inf)
    log_numerator = np.logaddexp.reduce(exponents, axis=-1)
    total = np.sum(np.broadcast_to(p, s.shape), axis=-1)

    safe_total = np.where(total > 0, total, 1.0)
    out = np.where(total > 0, log_numerator - np.log(safe_total), -np.inf)
    return out if out.ndim else float(out)


def log_utility(p: ArrayLike, g: ArrayLike, scn: Scenario) -> ArrayLike:
    """Natural log of the scenario's configured utility; -inf where it is 0."""
    if scn.utility is Utility.ENERGY_EFFICIENCY:
        return log_ee_utility(p, g, scn)
    with np.errstate(divide="ignore"):
        out = np.log(sr_utility(p, g, scn))
    return out if np.ndim(out) else float(out)
