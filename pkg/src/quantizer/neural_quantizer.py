"""
Neural surrogate of the decision-optimal partition.

A three-layer feed-forward network (inputs = bands, 20 sigmoid hidden
units, one linear output) regresses the oracle label index from the gain
vector. Decoding rounds the output and clamps it to 1..M.

Training is plain mini-batch gradient descent on the mean squared error,
seeded through a Philox generator so identical inputs give bit-identical
weights.
"""

from dataclasses import dataclass, field, replace
from typing import TYPE_CHECKING, Dict, List, Tuple, Union
import numpy as np
from loguru import logger

from ..utils.errors import DimensionError, TrainingDivergedError

if TYPE_CHECKING:
    from ..experiments.dataset_io import LabeledDataset

PARAMETER_NAMES = ("w1", "b1", "w2", "b2")


@dataclass(frozen=True)
class TrainConfig:
    """
    Attributes:
        learning_rate: Gradient-descent step size.
        epochs: Passes over the training data.
        batch_size: Samples per gradient step.
        seed: Seed for initial weights and batch shuffling.
        init_scale: Weights start uniform in +-init_scale/sqrt(fan_in).
        hidden_units: Width of the hidden layer.
        normalize_inputs: Standardize inputs with training mean/std; False feeds raw gains.
        log_every: Epoch interval for progress logging.
    """

    learning_rate: float = 0.05
    epochs: int = 500
    batch_size: int = 32
    seed: int = 0
    init_scale: float = 0.5
    hidden_units: int = 20
    normalize_inputs: bool = True
    log_every: int = 50

    def __post_init__(self):
        for name in ("learning_rate", "epochs", "batch_size", "init_scale", "hidden_units", "log_every"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be > 0, got {getattr(self, name)}")


@dataclass(eq=False)
class MlpModel:
    """
    Weights of the gain -> label-estimate network plus input normalization.

    Attributes:
        w1: Hidden weights, shape (hidden, inputs).
        b1: Hidden biases, shape (hidden,).
        w2: Output weights, shape (1, hidden).
        b2: Output bias.
        input_shift: Per-feature value subtracted before scaling.
        input_scale: Per-feature positive divisor.
        label_count: Number of decisions M the output is decoded into.
    """

    w1: np.ndarray
    b1: np.ndarray
    w2: np.ndarray
    b2: float
    input_shift: np.ndarray
    input_scale: np.ndarray
    label_count: int
    history: List[float] = field(default_factory=list, compare=False, repr=False)

    def __post_init__(self):
        self.w1 = np.asarray(self.w1, dtype=float)
        self.b1 = np.asarray(self.b1, dtype=float).reshape(-1)
        self.w2 = np.asarray(self.w2, dtype=float).reshape(1, -1)
        self.b2 = float(self.b2)
        self.input_shift = np.asarray(self.input_shift, dtype=float).reshape(-1)
        self.input_scale = np.asarray(self.input_scale, dtype=float).reshape(-1)

        hidden, inputs = self.w1.shape
        if self.b1.shape != (hidden,) or self.w2.shape != (1, hidden):
            raise DimensionError(f"inconsistent layer shapes w1={self.w1.shape}, b1={self.b1.shape}, w2={self.w2.shape}")
        if self.input_shift.shape != (inputs,) or self.input_scale.shape != (inputs,):
            raise DimensionError("normalization constants must have one entry per input")
        if np.any(~(self.input_scale > 0)):
            raise ValueError("input scales must be > 0")
        if self.label_count < 1:
            raise ValueError(f"label_count must be >= 1, got {self.label_count}")
        if not all(np.all(np.isfinite(p)) for p in self.parameters().values()):
            raise ValueError("model weights must be finite")

    @property
    def layers(self) -> Tuple[int, int, int]:
        hidden, inputs = self.w1.shape
        return inputs, hidden, 1

    def parameters(self) -> Dict[str, np.ndarray]:
        return {"w1": self.w1, "b1": self.b1, "w2": self.w2, "b2": np.array([self.b2])}

    def with_parameters(self, params: Dict[str, np.ndarray]) -> "MlpModel":
        return replace(
            self,
            w1=params["w1"].copy(),
            b1=params["b1"].copy(),
            w2=params["w2"].copy(),
            b2=float(np.asarray(params["b2"]).reshape(-1)[0]),
        )


def sigmoid(z: np.ndarray) -> np.ndarray:
    # tanh form avoids overflow in exp for large |z|
    return 0.5 * (1.0 + np.tanh(0.5 * z))


def normalize(model: MlpModel, g: np.ndarray) -> np.ndarray:
    return (g - model.input_shift) / model.input_scale


def _check_inputs(model: MlpModel, g) -> Tuple[np.ndarray, bool]:
    g = np.asarray(g, dtype=float)
    single = g.ndim == 1
    g = np.atleast_2d(g)
    if g.ndim != 2 or g.shape[1] != model.layers[0]:
        raise DimensionError(f"model expects {model.layers[0]} input(s), got shape {g.shape}")
    return g, single


def _forward_layers(params: Dict[str, np.ndarray], x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    hidden = sigmoid(x @ params["w1"].T + params["b1"])
    output = hidden @ params["w2"][0] + params["b2"][0]
    return hidden, output


def forward(model: MlpModel, g) -> Union[float, np.ndarray]:
    """Real-valued label estimate w2 . sigmoid(w1 . normalize(g) + b1) + b2."""
    g, single = _check_inputs(model, g)
    _, output = _forward_layers(model.parameters(), normalize(model, g))
    return float(output[0]) if single else output


def predict_label(model: MlpModel, g) -> Union[int, np.ndarray]:
    """Round the network output and clamp it to 1..label_count."""
    estimate = np.asarray(forward(model, g))
    labels = np.clip(np.rint(estimate), 1, model.label_count).astype(int)
    return int(labels) if labels.ndim == 0 else labels


def loss_and_gradients(params: Dict[str, np.ndarray], x: np.ndarray,
                       targets: np.ndarray) -> Tuple[float, Dict[str, np.ndarray]]:
    """
    Mean squared error over a batch of normalized inputs and its gradients.

    Returns:
        (loss, gradients keyed like ``params``).
    """
    hidden, output = _forward_layers(params, x)
    residual = output - targets
    loss = float(np.mean(residual ** 2))

    d_output = 2.0 * residual / len(x)
    grads = {
        "w2": (d_output @ hidden)[None, :],
        "b2": np.array([np.sum(d_output)]),
    }
    d_hidden = np.outer(d_output, params["w2"][0]) * hidden * (1.0 - hidden)
    grads["w1"] = d_hidden.T @ x
    grads["b1"] = np.sum(d_hidden, axis=0)
    return loss, grads


def init_model(n_inputs: int, label_count: int, cfg: TrainConfig, rng: np.random.Generator,
               input_shift: np.ndarray = None, input_scale: np.ndarray = None,
               output_bias: float = 0.0) -> MlpModel:
    """Seeded uniform initialization scaled by 1/sqrt(fan_in)."""
    hidden = cfg.hidden_units
    bound_1 = cfg.init_scale / np.sqrt(n_inputs)
    bound_2 = cfg.init_scale / np.sqrt(hidden)
    return MlpModel(
        w1=rng.uniform(-bound_1, bound_1, size=(hidden, n_inputs)),
        b1=np.zeros(hidden),
        w2=rng.uniform(-bound_2, bound_2, size=(1, hidden)),
        b2=output_bias,
        input_shift=np.zeros(n_inputs) if input_shift is None else input_shift,
        input_scale=np.ones(n_inputs) if input_scale is None else input_scale,
        label_count=label_count,
    )


def _normalization(gains: np.ndarray, enabled: bool) -> Tuple[np.ndarray, np.ndarray]:
    if not enabled:
        logger.warning("Training on raw gains without input standardization")
        return np.zeros(gains.shape[1]), np.ones(gains.shape[1])
    shift = gains.mean(axis=0)
    scale = gains.std(axis=0)
    scale = np.where(scale > 0, scale, 1.0)
    return shift, scale


def train(data: "LabeledDataset", cfg: TrainConfig, label_count: int) -> MlpModel:
    """
    Fit the network to (gain, label) pairs.

    The returned weights are those of the epoch with the lowest training-set
    MSE. ``history`` records that running best after every epoch, so it never
    increases even though single mini-batch steps can.

    Raises:
        ValueError: Empty dataset or a label outside 1..label_count.
        TrainingDivergedError: The training loss became non-finite.
    """
    gains = np.asarray(data.gains, dtype=float)
    labels = np.asarray(data.labels)
    if len(gains) == 0:
        raise ValueError("cannot train on an empty dataset")
    if label_count < 1 or np.any(labels < 1) or np.any(labels > label_count):
        raise ValueError(f"labels must lie in 1..{label_count}")

    targets = labels.astype(float)
    rng = np.random.Generator(np.random.Philox(cfg.seed))
    shift, scale = _normalization(gains, cfg.normalize_inputs)
    model = init_model(gains.shape[1], label_count, cfg, rng, shift, scale, output_bias=float(np.mean(targets)))

    x = normalize(model, gains)
    params = {name: value.copy() for name, value in model.parameters().items()}
    best_params, best_mse = params, np.inf
    history = []

    logger.info(f"Training {model.layers} network on {len(x)} samples for {cfg.epochs} epochs")
    for epoch in range(1, cfg.epochs + 1):
        order = rng.permutation(len(x))
        for start in range(0, len(x), cfg.batch_size):
            batch = order[start:start + cfg.batch_size]
            _, grads = loss_and_gradients(params, x[batch], targets[batch])
            for name in PARAMETER_NAMES:
                params[name] -= cfg.learning_rate * grads[name]

        _, output = _forward_layers(params, x)
        epoch_mse = float(np.mean((output - targets) ** 2))
        if not np.isfinite(epoch_mse):
            raise TrainingDivergedError(
                f"training loss became non-finite at epoch {epoch}; lower learning_rate"
            )
        if epoch_mse < best_mse:
            best_mse = epoch_mse
            best_params = {name: value.copy() for name, value in params.items()}
        history.append(best_mse)

        if epoch % cfg.log_every == 0 or epoch == cfg.epochs:
            logger.debug(f"epoch {epoch}/{cfg.epochs}: train MSE {epoch_mse:.6f} (best {best_mse:.6f})")

    model = model.with_parameters(best_params)
    model.history = history
    logger.info(f"Training finished: final train MSE {history[-1]:.6f}")
    return model


def gradient_check(model: MlpModel, sample: Tuple[np.ndarray, float], step: float = 1e-5) -> float:
    """
    Largest discrepancy between backprop and central finite differences.

    Each parameter's discrepancy is |analytic - numeric| divided by
    max(|analytic|, |numeric|, 1). The result is a relative error for
    gradient components of magnitude >= 1 and an absolute error below that.
    """
    g, target = sample
    x = normalize(model, np.atleast_2d(np.asarray(g, dtype=float)))
    targets = np.array([float(target)])
    params = {name: value.astype(float).copy() for name, value in model.parameters().items()}

    _, analytic = loss_and_gradients(params, x, targets)

    worst = 0.0
    for name in PARAMETER_NAMES:
        values = params[name]
        for index in np.ndindex(values.shape):
            original = values[index]
            values[index] = original + step
            loss_plus, _ = loss_and_gradients(params, x, targets)
            values[index] = original - step
            loss_minus, _ = loss_and_gradients(params, x, targets)
            values[index] = original

            numeric = (loss_plus - loss_minus) / (2 * step)
            exact = analytic[name][index]
            scale = max(abs(exact), abs(numeric), 1.0)
            worst = max(worst, abs(exact - numeric) / scale)
    return worst
