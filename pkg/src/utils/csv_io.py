"""
CSV files with a block of ``# key=value`` metadata lines before the header.

Every artifact the toolkit writes (datasets, decision sets, partitions,
results) goes through these helpers so that fingerprints and config hashes
live next to the data they describe.
"""

from pathlib import Path
from typing import Dict, Tuple, Union
import pandas as pd
from loguru import logger

PathLike = Union[str, Path]


def write_csv(frame: pd.DataFrame, path: PathLike, meta: Dict[str, str] = None) -> Path:
    """
    Write a DataFrame preceded by metadata comment lines.

    Args:
        frame: Table to write; the index is not written.
        path: Destination file. Parent directories are created.
        meta: Ordered key/value pairs emitted as ``# key=value`` lines.

    Returns:
        The resolved output path.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)

    with open(path, "w", newline="") as f:
        for key, value in (meta or {}).items():
            f.write(f"# {key}={value}\n")
        frame.to_csv(f, index=False, lineterminator="\n")

    logger.debug(f"Wrote {len(frame)} rows to {path}")
    return path


def read_meta(path: PathLike) -> Dict[str, str]:
    """Read only the ``# key=value`` lines at the top of a file."""
    meta = {}
    with open(path, "r") as f:
        for line in f:
            if not line.startswith("#"):
                break
            key, _, value = line[1:].strip().partition("=")
            meta[key.strip()] = value.strip()
    return meta


def read_csv(path: PathLike) -> Tuple[pd.DataFrame, Dict[str, str]]:
    """
    Read a file written by :func:`write_csv`.

    Floats are parsed with pandas' round-trip parser so values come back
    bit-identical to what was written.

    Returns:
        (table, metadata) tuple.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"CSV file not found: {path}")

    meta = read_meta(path)
    frame = pd.read_csv(path, comment="#", float_precision="round_trip")
    logger.debug(f"Read {len(frame)} rows from {path}")
    return frame, meta
