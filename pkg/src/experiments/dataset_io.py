"""
Channel-gain sampling, oracle labelling, train/test splitting and dataset CSVs.

Randomness comes from ``numpy.random.Generator(numpy.random.Philox(seed))``,
the counter-based Philox4x64-10 generator, so seeded runs reproduce on any
platform. Exp(1) gains are drawn by inverse CDF, g = -ln(1 - u).
"""

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Tuple, Union
import numpy as np
import pandas as pd
from loguru import logger

from ..channel.decision_sets import DecisionSet
from ..channel.model_core import Scenario
from ..quantizer.oracle import oracle_labels
from ..utils.csv_io import read_csv, write_csv
from ..utils.errors import FingerprintMismatchError

_TINY = np.finfo(float).tiny


def make_rng(seed: int) -> np.random.Generator:
    """Seeded Philox generator used for every random draw in the toolkit."""
    return np.random.Generator(np.random.Philox(seed))


def fingerprint(scn: Scenario, ds: DecisionSet) -> str:
    """Short sha256 digest identifying the scenario and decision set a dataset was labelled with."""
    payload = {
        "scenario": scn.to_dict(),
        "p_max": repr(float(ds.p_max)),
        "decisions": [[repr(float(v)) for v in row] for row in ds.decisions],
    }
    text = json.dumps(payload, sort_keys=True)
    return hashlib.sha256(text.encode("utf-8")).hexdigest()[:16]


@dataclass(eq=False)
class LabeledDataset:
    """
    Gain vectors paired with oracle-optimal decision labels.

    Attributes:
        gains: Shape (n, N), all entries > 0.
        labels: Shape (n,), values in 1..label_count.
        label_count: Size M of the decision set.
        fingerprint: Digest of the generating scenario and decision set.
    """

    gains: np.ndarray
    labels: np.ndarray
    label_count: int
    fingerprint: str

    def __post_init__(self):
        self.gains = np.atleast_2d(np.asarray(self.gains, dtype=float))
        self.labels = np.asarray(self.labels, dtype=int).reshape(-1)
        if len(self.gains) != len(self.labels):
            raise ValueError(f"{len(self.gains)} gain vectors but {len(self.labels)} labels")
        if np.any(~(self.gains > 0)):
            raise ValueError("all gains must be > 0")
        if np.any(self.labels < 1) or np.any(self.labels > self.label_count):
            raise ValueError(f"labels must lie in 1..{self.label_count}")

    def __len__(self) -> int:
        return len(self.labels)

    @property
    def n_bands(self) -> int:
        return self.gains.shape[1]

    def subset(self, index: np.ndarray) -> "LabeledDataset":
        return LabeledDataset(self.gains[index], self.labels[index], self.label_count, self.fingerprint)

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame(self.gains, columns=[f"g_{i + 1}" for i in range(self.n_bands)])
        frame["label"] = self.labels
        return frame


def sample_gains(n: int, n_bands: int, seed: int) -> np.ndarray:
    """
    Draw ``n`` i.i.d. gain vectors with Exp(1) components.

    Returns:
        Array of shape (n, n_bands), strictly positive.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if n_bands < 1:
        raise ValueError(f"n_bands must be >= 1, got {n_bands}")

    uniforms = make_rng(seed).random((n, n_bands))
    gains = -np.log1p(-uniforms)
    # u == 0 maps to g == 0; keep the support open
    return np.maximum(gains, _TINY)


def build_dataset(gains: np.ndarray, ds: DecisionSet, scn: Scenario) -> LabeledDataset:
    """Label every gain vector with its oracle-optimal decision."""
    gains = np.atleast_2d(np.asarray(gains, dtype=float))
    if len(gains) == 0:
        raise ValueError("cannot build a dataset from zero gain vectors")

    labels = oracle_labels(gains, ds, scn)
    data = LabeledDataset(gains, labels, len(ds), fingerprint(scn, ds))
    logger.debug(f"Labelled {len(data)} samples over {len(ds)} decisions")
    return data


def split(data: LabeledDataset, train_fraction: float, seed: int) -> Tuple[LabeledDataset, LabeledDataset]:
    """
    Seeded shuffle, then the first round(n * train_fraction) samples train.

    Raises:
        ValueError: If the fraction is outside (0, 1) or either side would be empty.
    """
    if not 0 < train_fraction < 1:
        raise ValueError(f"train_fraction must lie in (0, 1), got {train_fraction}")

    n_train = int(round(len(data) * train_fraction))
    if n_train == 0 or n_train == len(data):
        raise ValueError(f"splitting {len(data)} samples at {train_fraction} leaves one side empty")

    order = make_rng(seed).permutation(len(data))
    return data.subset(order[:n_train]), data.subset(order[n_train:])


def save_dataset(data: LabeledDataset, path: Union[str, Path], meta: dict = None) -> Path:
    """Write ``g_1..g_N,label`` rows under a ``# fingerprint=<hex>`` line."""
    header = {"fingerprint": data.fingerprint, "label_count": str(data.label_count)}
    header.update(meta or {})
    path = write_csv(data.to_frame(), path, header)
    logger.info(f"Saved {len(data)} samples to {path}")
    return path


def load_dataset(path: Union[str, Path], expected_fingerprint: Optional[str] = None) -> LabeledDataset:
    """
    Read a dataset CSV, optionally rejecting one labelled for another configuration.

    Raises:
        FingerprintMismatchError: If ``expected_fingerprint`` differs from the file's.
    """
    frame, meta = read_csv(path)
    stored = meta.get("fingerprint")
    if stored is None:
        raise ValueError(f"{path} has no fingerprint header line")
    if expected_fingerprint is not None and stored != expected_fingerprint:
        raise FingerprintMismatchError(
            f"{path} was labelled for fingerprint {stored}, configuration expects {expected_fingerprint}"
        )

    gain_columns = [c for c in frame.columns if c.startswith("g_")]
    label_count = int(meta["label_count"]) if "label_count" in meta else int(frame["label"].max())
    return LabeledDataset(
        gains=frame[gain_columns].to_numpy(dtype=float),
        labels=frame["label"].to_numpy(dtype=int),
        label_count=label_count,
        fingerprint=stored,
    )
