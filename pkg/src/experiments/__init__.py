"""
Datasets, evaluation and the command implementations built on them.
"""

from .dataset_io import (
    LabeledDataset,
    make_rng,
    fingerprint,
    sample_gains,
    build_dataset,
    split,
    save_dataset,
    load_dataset,
)
from .evaluation import (
    Baseline,
    LabelerKind,
    OracleLabeler,
    AnalyticLabeler,
    NeuralLabeler,
    EvalReport,
    SweepSettings,
    decision_set_for,
    optimality_loss,
    sweep,
    compression_rate,
    gamma_table,
)
from .run_config import RunConfig

__all__ = [
    "LabeledDataset",
    "make_rng",
    "fingerprint",
    "sample_gains",
    "build_dataset",
    "split",
    "save_dataset",
    "load_dataset",
    "Baseline",
    "LabelerKind",
    "OracleLabeler",
    "AnalyticLabeler",
    "NeuralLabeler",
    "EvalReport",
    "SweepSettings",
    "decision_set_for",
    "optimality_loss",
    "sweep",
    "compression_rate",
    "gamma_table",
    "RunConfig",
]
