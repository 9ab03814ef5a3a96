"""Link model and discrete decision sets."""

from .model_core import (
    Scenario,
    Utility,
    snr,
    efficiency,
    ee_utility,
    sr_utility,
    utility,
    log_ee_utility,
    log_utility,
)
from .decision_sets import (
    DecisionSet,
    Spacing,
    single_channel_grid,
    ee_pair_grid,
    sr_simplex_grid,
    save_decision_set,
    load_decision_set,
)

__all__ = [
    "Scenario",
    "Utility",
    "snr",
    "efficiency",
    "ee_utility",
    "sr_utility",
    "utility",
    "log_ee_utility",
    "log_utility",
    "DecisionSet",
    "Spacing",
    "single_channel_grid",
    "ee_pair_grid",
    "sr_simplex_grid",
    "save_decision_set",
    "load_decision_set",
]
