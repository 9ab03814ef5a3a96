"""
Quantizers of channel gains into decision labels.

- analytic_quantizer: closed-form single-band EE partition
- oracle: brute-force labels and continuous optimum
- neural_quantizer: small MLP surrogate of the partition
"""

from .analytic_quantizer import ScalarPartition, transition_level, build_partition, quantize
from .oracle import (
    FeasibleRegion,
    OracleConfig,
    oracle_label,
    oracle_labels,
    ee_opt_power_1band,
    waterfill_sr,
    continuous_opt,
    log_continuous_opt,
    discrete_best,
)
from .neural_quantizer import MlpModel, TrainConfig, forward, train, predict_label, gradient_check
from .model_store import save_model, load_model

__all__ = [
    "ScalarPartition",
    "transition_level",
    "build_partition",
    "quantize",
    "FeasibleRegion",
    "OracleConfig",
    "oracle_label",
    "oracle_labels",
    "ee_opt_power_1band",
    "waterfill_sr",
    "continuous_opt",
    "log_continuous_opt",
    "discrete_best",
    "MlpModel",
    "TrainConfig",
    "forward",
    "train",
    "predict_label",
    "gradient_check",
    "save_model",
    "load_model",
]
