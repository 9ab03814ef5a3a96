"""
Implementations of the command-line subcommands.

Every command takes a validated :class:`RunConfig` and an optional seed
override, writes its artifacts under ``cfg.output_dir`` and returns a process
exit code. Errors carrying an exit code (see ``src.utils.errors``) propagate
to the entry point, which maps them.

Files written:

    gen-data   decisions.csv, train.csv, test.csv
    design     partition.csv
    train      model.txt, training_curve.csv
    eval       eval.csv
    sweep      results.csv, gamma.csv
"""

from dataclasses import replace
from pathlib import Path
from typing import List, Optional
import pandas as pd
from loguru import logger

from ..channel.decision_sets import DecisionSet, Spacing, save_decision_set
from ..channel.model_core import Scenario, Utility
from ..quantizer.analytic_quantizer import build_partition, save_partition
from ..quantizer.model_store import load_model, save_model
from ..quantizer.neural_quantizer import train
from ..utils.config import config as env_config
from ..utils.csv_io import write_csv
from ..utils.errors import UnsupportedAnalyticalCaseError
from .dataset_io import build_dataset, fingerprint, load_dataset, sample_gains, save_dataset, split
from .evaluation import (
    AnalyticLabeler,
    EvalReport,
    LabelerKind,
    LossEstimate,
    NeuralLabeler,
    OracleLabeler,
    SeedBundle,
    SweepRecord,
    decision_set_for,
    gamma_table,
    optimality_loss,
    sweep,
)
from .run_config import RunConfig

DECISIONS_FILE = "decisions.csv"
TRAIN_FILE = "train.csv"
TEST_FILE = "test.csv"
PARTITION_FILE = "partition.csv"
MODEL_FILE = "model.txt"
CURVE_FILE = "training_curve.csv"
EVAL_FILE = "eval.csv"
RESULTS_FILE = "results.csv"
GAMMA_FILE = "gamma.csv"


def _decision_set(cfg: RunConfig) -> DecisionSet:
    return decision_set_for(cfg.scenario, cfg.sweep.m, Spacing(cfg.sweep.spacing))


def _meta(cfg: RunConfig, **extra) -> dict:
    meta = {"config": cfg.config_hash}
    meta.update({key: str(value) for key, value in extra.items()})
    return meta


def _describe(scn: Scenario) -> str:
    return (f"utility={scn.utility.value} N={scn.n_bands} p_max={scn.p_max} "
            f"noise_var={scn.noise_var} c={scn.c}")


def cmd_gen_data(cfg: RunConfig, seed: Optional[int] = None) -> int:
    """Sample gains, label them with the oracle and write the train/test split."""
    base_seed = cfg.seeds_for(seed)[0]
    seeds = SeedBundle.from_base(base_seed)
    scn = cfg.scenario
    ds = _decision_set(cfg)
    out = Path(cfg.output_dir)

    logger.info(f"Generating {cfg.sweep.n_samples} samples: {_describe(scn)} M={len(ds)} seed={base_seed}")
    gains = sample_gains(cfg.sweep.n_samples, scn.n_bands, seeds.data)
    data = build_dataset(gains, ds, scn)
    train_data, test_data = split(data, cfg.sweep.train_fraction, seeds.split)

    meta = _meta(cfg, seed=base_seed)
    save_decision_set(ds, out / DECISIONS_FILE, meta)
    save_dataset(train_data, out / TRAIN_FILE, meta)
    save_dataset(test_data, out / TEST_FILE, meta)

    print(f"✅ Dataset generated in {out}")
    print(f"   📊 Train samples: {len(train_data)}")
    print(f"   📊 Test samples:  {len(test_data)}")
    print(f"   🔑 Fingerprint:   {data.fingerprint}")
    return 0


def cmd_design(cfg: RunConfig, seed: Optional[int] = None) -> int:
    """Write the closed-form single-band partition for the configured levels."""
    ds = _decision_set(cfg)
    part = build_partition(ds, cfg.scenario)
    path = save_partition(part, Path(cfg.output_dir) / PARTITION_FILE, _meta(cfg))

    print(f"✅ Partition with {len(ds)} cells written to {path}")
    for lower, upper, label, power in part.cells():
        print(f"   label {label}: g in [{lower:.6g}, {upper:.6g}) -> p = {power:.6g} mW")
    return 0


def cmd_train(cfg: RunConfig, seed: Optional[int] = None) -> int:
    """Fit the network on train.csv and save it with its training curve."""
    base_seed = cfg.seeds_for(seed)[0]
    scn = cfg.scenario
    ds = _decision_set(cfg)
    out = Path(cfg.output_dir)

    train_data = load_dataset(out / TRAIN_FILE, expected_fingerprint=fingerprint(scn, ds))
    train_cfg = replace(cfg.train, seed=SeedBundle.from_base(base_seed).init)

    model = train(train_data, train_cfg, len(ds))
    save_model(model, out / MODEL_FILE, comment=f"config={cfg.config_hash} seed={train_cfg.seed}")

    curve = pd.DataFrame({"epoch": range(1, len(model.history) + 1), "train_mse": model.history})
    write_csv(curve, out / CURVE_FILE, _meta(cfg, seed=train_cfg.seed))

    print(f"✅ Model trained on {len(train_data)} samples")
    print(f"   🧠 Layers: {model.layers}")
    print(f"   📉 Final train MSE: {model.history[-1]:.6f}")
    print(f"   📋 File: {out / MODEL_FILE}")
    return 0


def cmd_eval(cfg: RunConfig, seed: Optional[int] = None) -> int:
    """Optimality loss of every applicable labeler on test.csv."""
    base_seed = cfg.seeds_for(seed)[0]
    scn = cfg.scenario
    ds = _decision_set(cfg)
    out = Path(cfg.output_dir)

    test_data = load_dataset(out / TEST_FILE, expected_fingerprint=fingerprint(scn, ds))

    labelers = [OracleLabeler(ds, scn)]
    try:
        labelers.append(AnalyticLabeler(build_partition(ds, scn)))
    except UnsupportedAnalyticalCaseError:
        logger.debug("Analytic labeler not applicable to this scenario")
    model_path = out / MODEL_FILE
    if model_path.exists():
        labelers.append(NeuralLabeler(load_model(model_path)))
    else:
        logger.warning(f"No model at {model_path}; skipping the neural labeler")

    report = EvalReport()
    for labeler in labelers:
        loss = optimality_loss(labeler, test_data.gains, ds, scn, cfg.baseline, cfg.oracle)
        report.records.append(_record(scn, len(ds), labeler.kind, cfg, loss, base_seed))
    write_csv(report.results_frame(), out / EVAL_FILE, _meta(cfg))

    print(f"✅ Evaluated {len(test_data)} test samples ({cfg.baseline.value} baseline)")
    for record in report.records:
        print(f"   {record.labeler:>8}: {record.mean_loss_pct:.4f}% ± {record.stderr_pct:.4f}")
    return 0


def _record(scn: Scenario, m: int, kind: LabelerKind, cfg: RunConfig, loss: LossEstimate, seed: int) -> SweepRecord:
    return SweepRecord(
        utility=scn.utility.value,
        m=m,
        labeler=LabelerKind(kind).value,
        baseline=cfg.baseline.value,
        mean_loss_pct=loss.mean_pct,
        stderr_pct=loss.stderr_pct,
        n_test=loss.n,
        seed=seed,
    )


def _sweep_labelers(cfg: RunConfig, scn: Scenario) -> List[LabelerKind]:
    kinds = [LabelerKind(k) for k in cfg.sweep.labelers]
    analytic_ok = scn.n_bands == 1 and scn.utility is Utility.ENERGY_EFFICIENCY
    if LabelerKind.ANALYTIC in kinds and not analytic_ok:
        logger.warning(f"Skipping the analytic labeler for utility '{scn.utility.value}' with N={scn.n_bands}")
        kinds.remove(LabelerKind.ANALYTIC)
    return kinds


def _gamma_report(report: EvalReport, cfg: RunConfig, utility: Utility) -> EvalReport:
    records = [r for r in report.records if r.utility == utility.value]
    chosen = [r for r in records if r.labeler == cfg.sweep.gamma_labeler]
    if records and not chosen:
        fallback = records[0].labeler
        logger.warning(f"No '{cfg.sweep.gamma_labeler}' rows for {utility.value}; compression rate uses '{fallback}'")
        chosen = [r for r in records if r.labeler == fallback]
    return EvalReport(records=chosen)


def _write_sweep(report: EvalReport, cfg: RunConfig, out: Path):
    meta = _meta(cfg, baseline=cfg.baseline.value)
    if report.partial:
        meta["partial"] = "true"
    write_csv(report.results_frame(), out / RESULTS_FILE, meta)
    write_csv(report.gamma_frame(), out / GAMMA_FILE, meta)


def cmd_sweep(cfg: RunConfig, seed: Optional[int] = None) -> int:
    """Loss against M for every configured utility, labeler and seed, plus the gamma table."""
    out = Path(cfg.output_dir)
    report = EvalReport()
    seeds = cfg.seeds_for(seed)
    workers = env_config.workers

    try:
        for utility in cfg.sweep_utilities():
            scn = cfg.scenario_for(utility)
            for kind in _sweep_labelers(cfg, scn):
                for base_seed in seeds:
                    report.extend(sweep(
                        cfg.sweep.m_values, kind, scn,
                        settings=cfg.sweep.settings,
                        train_cfg=cfg.train,
                        oracle_cfg=cfg.oracle,
                        baseline=cfg.baseline,
                        seed=base_seed,
                        workers=workers,
                    ))
            report.gamma.extend(gamma_table(
                _gamma_report(report, cfg, utility), cfg.sweep.sigmas, cfg.sweep.reference_sigma,
            ))
    except KeyboardInterrupt:
        logger.warning(f"Sweep interrupted; flushing {len(report.records)} completed record(s)")
        report.partial = True
        _write_sweep(report, cfg, out)
        print(f"⚠️  Sweep interrupted, partial results in {out}")
        return 130

    _write_sweep(report, cfg, out)

    print(f"✅ Sweep finished: {len(report.records)} result rows")
    print(f"   📋 Results: {out / RESULTS_FILE}")
    print(f"   📋 Compression rate: {out / GAMMA_FILE}")
    for record in report.gamma:
        gamma = "undefined" if record.gamma is None else f"{record.gamma:.3f}"
        print(f"   {record.utility} sigma={record.sigma_pct}%: M={record.m_sigma} gamma={gamma} ({record.reference_flag})")
    return 0


COMMANDS = {
    "gen-data": cmd_gen_data,
    "design": cmd_design,
    "train": cmd_train,
    "eval": cmd_eval,
    "sweep": cmd_sweep,
}
