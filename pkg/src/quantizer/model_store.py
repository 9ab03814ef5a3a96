"""
Plain-text persistence for trained quantizer networks.

File layout, one ``key=value`` per line after an optional ``#`` comment:

    layers=2,20,1
    label_count=4
    input_shift=<N values>
    input_scale=<N values>
    w1=<hidden*N values, row-major>
    b1=<hidden values>
    w2=<hidden values>
    b2=<1 value>

Floats use 17 significant digits so a save/load cycle is bit-exact.
"""

from pathlib import Path
from typing import Dict, Union
import numpy as np
from loguru import logger

from .neural_quantizer import MlpModel

REQUIRED_KEYS = ("layers", "label_count", "input_shift", "input_scale", "w1", "b1", "w2", "b2")


def _format_values(values: np.ndarray) -> str:
    return ",".join(f"{float(v):.17g}" for v in np.asarray(values).reshape(-1))


def _parse_values(text: str) -> np.ndarray:
    if not text:
        return np.zeros(0)
    return np.array([float(v) for v in text.split(",")], dtype=float)


def save_model(model: MlpModel, path: Union[str, Path], comment: str = None) -> Path:
    """
    Write a model file.

    Args:
        model: Trained network.
        path: Destination file. Parent directories are created.
        comment: Optional single line written as ``# comment``.

    Returns:
        The output path.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)

    lines = []
    if comment:
        lines.append(f"# {comment}")
    lines += [
        "layers=" + ",".join(str(n) for n in model.layers),
        f"label_count={model.label_count}",
        "input_shift=" + _format_values(model.input_shift),
        "input_scale=" + _format_values(model.input_scale),
        "w1=" + _format_values(model.w1),
        "b1=" + _format_values(model.b1),
        "w2=" + _format_values(model.w2),
        "b2=" + _format_values([model.b2]),
    ]
    with open(path, "w", newline="") as f:
        f.write("\n".join(lines) + "\n")

    logger.info(f"Model saved to {path}")
    return path


def load_model(path: Union[str, Path]) -> MlpModel:
    """
    Read a model file written by :func:`save_model`.

    Raises:
        FileNotFoundError: If the file does not exist.
        ValueError: If keys are missing or sizes disagree with the layer header.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Model file not found: {path}")

    entries: Dict[str, str] = {}
    with open(path, "r") as f:
        for line in f:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ValueError(f"{path}: malformed line {line!r}")
            entries[key.strip()] = value.strip()

    missing = [key for key in REQUIRED_KEYS if key not in entries]
    if missing:
        raise ValueError(f"{path}: missing keys {', '.join(missing)}")

    inputs, hidden, outputs = (int(n) for n in entries["layers"].split(","))
    if outputs != 1:
        raise ValueError(f"{path}: only single-output networks are supported, got {outputs}")

    w1 = _parse_values(entries["w1"])
    if w1.size != hidden * inputs:
        raise ValueError(f"{path}: w1 has {w1.size} values, layers need {hidden * inputs}")
    b2 = _parse_values(entries["b2"])
    if b2.size != 1:
        raise ValueError(f"{path}: b2 must hold exactly one value")

    model = MlpModel(
        w1=w1.reshape(hidden, inputs),
        b1=_parse_values(entries["b1"]),
        w2=_parse_values(entries["w2"]).reshape(1, -1),
        b2=b2[0],
        input_shift=_parse_values(entries["input_shift"]),
        input_scale=_parse_values(entries["input_scale"]),
        label_count=int(entries["label_count"]),
    )
    logger.debug(f"Loaded {model.layers} model from {path}")
    return model
