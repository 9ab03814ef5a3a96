"""
Optimality loss and compression-rate evaluation.

The optimality loss of a labeler is the mean relative utility gap, in
percent, between a reference u*(g) and the utility of the decision the
labeler picks:

    loss = mean_g |u*(g) - u(d_label(g); g)| / u*(g) * 100

u*(g) is either the continuous optimum over the feasible region or the best
decision inside the decision set. The compression rate at loss target sigma is

    gamma(sigma) = log2 M(reference) / log2 M(sigma)

with M(sigma) the smallest swept decision count whose loss meets sigma.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from enum import Enum
from typing import Callable, Dict, List, Optional, Sequence
import numpy as np
import pandas as pd
from loguru import logger

from ..channel.decision_sets import DecisionSet, Spacing, ee_pair_grid, single_channel_grid, sr_simplex_grid
from ..channel.model_core import Scenario, Utility, log_utility
from ..quantizer.analytic_quantizer import ScalarPartition, build_partition, quantize
from ..quantizer.neural_quantizer import MlpModel, TrainConfig, predict_label, train
from ..quantizer.oracle import OracleConfig, log_continuous_opt, log_discrete_best, oracle_labels
from ..utils.errors import DegenerateScenarioError
from .dataset_io import build_dataset, sample_gains, split

RESULT_COLUMNS = ["utility", "M", "labeler", "baseline", "mean_loss_pct", "stderr_pct", "n_test", "seed"]
GAMMA_COLUMNS = ["utility", "sigma_pct", "M_sigma", "gamma", "reference_flag"]
UNDEFINED = "undefined"


class LabelerKind(str, Enum):
    """Source of the decision label at evaluation time."""

    ORACLE = "oracle"
    ANALYTIC = "analytic"
    NEURAL = "nn"


class Baseline(str, Enum):
    """Reference utility u*(g) in the loss."""

    CONTINUOUS = "continuous"
    DISCRETE_BEST = "discrete_best"


class OracleLabeler:
    """Brute-force argmax over the decision set."""

    kind = LabelerKind.ORACLE

    def __init__(self, ds: DecisionSet, scn: Scenario):
        self.ds = ds
        self.scn = scn

    def __call__(self, gains: np.ndarray) -> np.ndarray:
        return oracle_labels(gains, self.ds, self.scn)


class AnalyticLabeler:
    """Closed-form single-band partition."""

    kind = LabelerKind.ANALYTIC

    def __init__(self, partition: ScalarPartition):
        self.partition = partition

    def __call__(self, gains: np.ndarray) -> np.ndarray:
        gains = np.atleast_2d(gains)
        return np.atleast_1d(quantize(self.partition, gains[:, 0]))


class NeuralLabeler:
    """Rounded output of a trained network."""

    kind = LabelerKind.NEURAL

    def __init__(self, model: MlpModel):
        self.model = model

    def __call__(self, gains: np.ndarray) -> np.ndarray:
        return np.atleast_1d(predict_label(self.model, np.atleast_2d(gains)))


Labeler = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class LossEstimate:
    """Mean loss in percent with its Monte-Carlo standard error."""

    mean_pct: float
    stderr_pct: float
    n: int


@dataclass(frozen=True)
class SeedBundle:
    """Named seeds every random step of one sweep replicate draws from."""

    base: int
    data: int
    split: int
    init: int

    @classmethod
    def from_base(cls, base: int) -> "SeedBundle":
        data, split_seed, init = np.random.SeedSequence(base).generate_state(3, dtype=np.uint64)
        return cls(base=base, data=int(data), split=int(split_seed), init=int(init))


@dataclass(frozen=True)
class SweepSettings:
    """
    Attributes:
        n_samples: Gain vectors drawn per replicate, before the split.
        train_fraction: Share of samples used for training.
        spacing: Level spacing for single-band grids.
    """

    n_samples: int = 10000
    train_fraction: float = 0.9
    spacing: Spacing = Spacing.UNIFORM


@dataclass(frozen=True)
class SweepRecord:
    utility: str
    m: int
    labeler: str
    baseline: str
    mean_loss_pct: float
    stderr_pct: float
    n_test: int
    seed: int


@dataclass(frozen=True)
class GammaRecord:
    utility: str
    sigma_pct: float
    m_sigma: Optional[int]
    gamma: Optional[float]
    reference_flag: str


@dataclass
class EvalReport:
    """Per-M loss records and the compression-rate table derived from them."""

    records: List[SweepRecord] = field(default_factory=list)
    gamma: List[GammaRecord] = field(default_factory=list)
    partial: bool = False

    def extend(self, other: "EvalReport"):
        self.records.extend(other.records)
        self.gamma.extend(other.gamma)
        self.partial = self.partial or other.partial

    def loss_curve(self) -> Dict[int, float]:
        """Mean loss per decision count, averaged over replicates."""
        by_m: Dict[int, List[float]] = {}
        for record in self.records:
            by_m.setdefault(record.m, []).append(record.mean_loss_pct)
        return {m: float(np.mean(losses)) for m, losses in sorted(by_m.items())}

    def results_frame(self) -> pd.DataFrame:
        rows = [asdict(r) for r in self.records]
        frame = pd.DataFrame(rows, columns=[f.name for f in SweepRecord.__dataclass_fields__.values()])
        return frame.rename(columns={"m": "M"})[RESULT_COLUMNS]

    def gamma_frame(self) -> pd.DataFrame:
        rows = [{
            "utility": r.utility,
            "sigma_pct": r.sigma_pct,
            "M_sigma": UNDEFINED if r.m_sigma is None else r.m_sigma,
            "gamma": UNDEFINED if r.gamma is None else r.gamma,
            "reference_flag": r.reference_flag,
        } for r in self.gamma]
        return pd.DataFrame(rows, columns=GAMMA_COLUMNS)


def decision_set_for(scn: Scenario, m: int, spacing: Spacing = Spacing.UNIFORM) -> DecisionSet:
    """Decision set used for a scenario at size M."""
    if scn.n_bands == 1:
        return single_channel_grid(m, scn.p_max, spacing)
    if scn.n_bands == 2:
        if scn.utility is Utility.ENERGY_EFFICIENCY:
            return ee_pair_grid(m, scn.p_max)
        return sr_simplex_grid(m, scn.p_max)
    raise ValueError(f"decision grids are defined for one or two bands, got {scn.n_bands}")


def log_reference_utility(gains: np.ndarray, ds: DecisionSet, scn: Scenario,
                          baseline: Baseline = Baseline.CONTINUOUS,
                          oracle_cfg: OracleConfig = None) -> np.ndarray:
    """log u*(g) for every gain vector under the chosen baseline."""
    gains = np.atleast_2d(gains)
    if Baseline(baseline) is Baseline.CONTINUOUS:
        return np.atleast_1d(log_continuous_opt(gains, scn, oracle_cfg))
    return log_discrete_best(gains, ds, scn)


def optimality_loss(labeler: Labeler, gains: np.ndarray, ds: DecisionSet, scn: Scenario,
                    baseline: Baseline = Baseline.CONTINUOUS, oracle_cfg: OracleConfig = None,
                    log_reference: np.ndarray = None) -> LossEstimate:
    """
    Mean relative utility loss of ``labeler`` over test gains, in percent.

    Each sample's loss is |1 - exp(log u - log u*)|, which stays defined
    where EE utilities underflow at small gains.

    Args:
        log_reference: Precomputed log u*(g); computed from ``baseline`` when omitted.

    Raises:
        ValueError: Empty test set.
        DegenerateScenarioError: u*(g) = 0 for some sample.
    """
    gains = np.atleast_2d(np.asarray(gains, dtype=float))
    if len(gains) == 0:
        raise ValueError("optimality loss needs at least one test sample")

    if log_reference is None:
        log_reference = log_reference_utility(gains, ds, scn, baseline, oracle_cfg)
    log_reference = np.asarray(log_reference, dtype=float)
    if np.any(~np.isfinite(log_reference)):
        raise DegenerateScenarioError("reference utility u*(g) is zero; the relative loss is undefined")

    log_achieved = log_utility(ds.power(labeler(gains)), gains, scn)
    losses = np.abs(1.0 - np.exp(log_achieved - log_reference)) * 100.0

    n = len(losses)
    stderr = float(np.std(losses, ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    return LossEstimate(mean_pct=float(np.mean(losses)), stderr_pct=stderr, n=n)


def make_labeler(kind: LabelerKind, ds: DecisionSet, scn: Scenario, train_data=None,
                 train_cfg: TrainConfig = None) -> Labeler:
    """Build the labeler of the requested kind for one decision set."""
    kind = LabelerKind(kind)
    if kind is LabelerKind.ORACLE:
        return OracleLabeler(ds, scn)
    if kind is LabelerKind.ANALYTIC:
        return AnalyticLabeler(build_partition(ds, scn))
    if train_data is None:
        raise ValueError("the neural labeler needs training data")
    return NeuralLabeler(train(train_data, train_cfg or TrainConfig(), len(ds)))


def sweep(m_values: Sequence[int], kind: LabelerKind, scn: Scenario, settings: SweepSettings = None,
          train_cfg: TrainConfig = None, oracle_cfg: OracleConfig = None,
          baseline: Baseline = Baseline.CONTINUOUS, seed: int = 0, workers: int = 1) -> EvalReport:
    """
    Evaluate one labeler kind over a list of decision counts.

    Every M shares one gain sample and one split permutation, so test gains
    (and the continuous reference) are identical across legs.
    """
    m_values = [int(m) for m in m_values]
    if any(b <= a for a, b in zip(m_values, m_values[1:])):
        raise ValueError(f"M values must be strictly increasing, got {m_values}")
    if not m_values:
        return EvalReport()

    kind = LabelerKind(kind)
    baseline = Baseline(baseline)
    settings = settings or SweepSettings()
    train_cfg = train_cfg or TrainConfig()
    oracle_cfg = oracle_cfg or OracleConfig()
    seeds = SeedBundle.from_base(seed)

    logger.info(
        f"Sweep: utility={scn.utility.value} labeler={kind.value} baseline={baseline.value} "
        f"seed={seed} M={m_values}"
    )
    gains = sample_gains(settings.n_samples, scn.n_bands, seeds.data)

    shared_log_reference = None
    if baseline is Baseline.CONTINUOUS:
        probe = build_dataset(gains, decision_set_for(scn, m_values[0], settings.spacing), scn)
        _, probe_test = split(probe, settings.train_fraction, seeds.split)
        shared_log_reference = np.atleast_1d(log_continuous_opt(probe_test.gains, scn, oracle_cfg))

    def leg(m: int) -> SweepRecord:
        ds = decision_set_for(scn, m, settings.spacing)
        train_data, test_data = split(build_dataset(gains, ds, scn), settings.train_fraction, seeds.split)
        labeler = make_labeler(kind, ds, scn, train_data, replace(train_cfg, seed=seeds.init))
        loss = optimality_loss(labeler, test_data.gains, ds, scn, baseline, oracle_cfg, shared_log_reference)
        logger.info(f"  M={m}: loss {loss.mean_pct:.4f}% +- {loss.stderr_pct:.4f}")
        return SweepRecord(
            utility=scn.utility.value,
            m=m,
            labeler=kind.value,
            baseline=baseline.value,
            mean_loss_pct=loss.mean_pct,
            stderr_pct=loss.stderr_pct,
            n_test=loss.n,
            seed=seed,
        )

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(leg, m_values))
    else:
        records = [leg(m) for m in m_values]

    return EvalReport(records=records)


def _smallest_m_meeting(curve: Dict[int, float], sigma: float) -> Optional[int]:
    for m, loss in curve.items():
        if loss <= sigma:
            return m
    return None


def compression_rate(report: EvalReport, sigma: float, reference_sigma: float = 1.0) -> GammaRecord:
    """
    gamma(sigma) = log2 M(reference_sigma) / log2 M(sigma).

    When no swept M meets the reference loss, the largest swept M stands in
    and the record is flagged ``substituted``. When no swept M meets sigma,
    gamma is undefined.
    """
    curve = report.loss_curve()
    utility_name = report.records[0].utility if report.records else ""
    if not curve:
        return GammaRecord(utility_name, sigma, None, None, UNDEFINED)

    m_reference = _smallest_m_meeting(curve, reference_sigma)
    flag = "measured"
    if m_reference is None:
        m_reference = max(curve)
        flag = "substituted"
        logger.warning(
            f"No swept M reaches the {reference_sigma}% reference loss for {utility_name}; "
            f"using M={m_reference} as reference"
        )

    m_sigma = _smallest_m_meeting(curve, sigma)
    if m_sigma is None or m_sigma < 2 or m_reference < 2:
        return GammaRecord(utility_name, sigma, m_sigma, None, flag)

    return GammaRecord(utility_name, sigma, m_sigma, math.log2(m_reference) / math.log2(m_sigma), flag)


def gamma_table(report: EvalReport, sigmas: Sequence[float], reference_sigma: float = 1.0) -> List[GammaRecord]:
    return [compression_rate(report, sigma, reference_sigma) for sigma in sigmas]
