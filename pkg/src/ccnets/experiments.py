"""The three published comparisons, data resolution, and report emission.

Experiment 1 pits the cooperative classifier against an autoencoder-plus-MLP
pipeline; experiment 2 trains the same MLP on original, generated, and
reconstructed features; experiment 3 compares single generation against
tenfold amplification. All arms of one run share the identical sequential
split and its train-fitted normalization.
"""
from __future__ import annotations

import csv
import json
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .baselines import encode_features, predict, train_autoencoder, train_mlp
from .config import RunConfig
from .data import (
    NormalizationStats,
    TabularDataset,
    load_csv,
    normalize,
    split_sequential,
    synth_imbalanced,
)
from .metrics import Metrics, compute_metrics, fit_log_curve
from .networks import CooperativeTriple, amplify, generate_dataset, reconstruct_dataset
from .trainer import EpochRecord, LossSummary, build_triple, evaluate, train

AUTOENCODER_LATENT = 50


@dataclass
class DataBundle:
    """Normalized sequential splits plus provenance."""

    train: TabularDataset
    test: TabularDataset
    stats: NormalizationStats
    source: str


def resolve_dataset(cfg: RunConfig, quiet: bool = False) -> DataBundle:
    """Load the configured CSV or fall back to the synthetic stand-in, then
    split sequentially and z-score with train statistics."""
    ds_cfg = cfg.dataset
    if ds_cfg.path and Path(ds_cfg.path).exists():
        ds = load_csv(ds_cfg.path)
        source = f"csv:{ds_cfg.path}"
    else:
        if ds_cfg.path and not quiet:
            print(f"dataset file {ds_cfg.path} not found; falling back to synthetic data")
        elif not quiet:
            print("no dataset path configured; using the synthetic stand-in")
        synth = ds_cfg.fallback_synth
        ds = synth_imbalanced(seed=synth.seed, n=synth.n, fraud_rate=synth.fraud_rate,
                              observe_size=cfg.observe_size, separation=synth.separation)
        source = "synthetic"
    if ds_cfg.rows is not None and ds_cfg.rows < ds.n_rows:
        ds = ds.take(ds_cfg.rows)
        source += f"[:{ds_cfg.rows}]"
    train_ds, test_ds = split_sequential(ds, ds_cfg.train_fraction)
    train_n, test_n, stats = normalize(train_ds, test_ds)
    return DataBundle(train=train_n, test=test_n, stats=stats, source=source)


def normal_rows(ds: TabularDataset) -> TabularDataset:
    mask = ds.labels.ravel() == 0
    return TabularDataset(ds.features[mask], ds.labels[mask], list(ds.columns))


@dataclass
class ArmResult:
    name: str
    metrics: Metrics
    train_rows: int
    curve_fits: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        out = {"name": self.name, "train_rows": self.train_rows}
        out.update(self.metrics.as_dict())
        out["curve_fits"] = self.curve_fits
        return out


@dataclass
class ExperimentReport:
    experiment: str
    seed: int
    arms: list[ArmResult]
    curves: dict[str, str]
    config: dict
    source: str
    wall_clock_sec: float

    def arm(self, name: str) -> ArmResult:
        for arm in self.arms:
            if arm.name == name:
                return arm
        raise KeyError(name)

    def as_dict(self) -> dict:
        return {
            "experiment": self.experiment,
            "seed": self.seed,
            "arms": [a.as_dict() for a in self.arms],
            "curves": self.curves,
            "config": self.config,
            "source": self.source,
            "wall_clock_sec": self.wall_clock_sec,
        }


def _safe_fit(series) -> dict | None:
    values = [float(v) for v in series]
    if len(values) < 3 or min(values) <= 0:
        return None
    fit = fit_log_curve(values)
    return {"slope": fit.slope, "intercept": fit.intercept, "r2": fit.r2}


def ccnets_curve_fits(records: list[EpochRecord]) -> dict:
    return {series: _safe_fit([getattr(r.train, series) for r in records])
            for series in LossSummary.SERIES}


def write_ccnets_curves(records: list[EpochRecord], path: Path) -> None:
    """Long-format curve CSV: epoch,phase,series,value."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["epoch", "phase", "series", "value"])
        for rec in records:
            for series in LossSummary.SERIES:
                writer.writerow([rec.epoch, "train", series, repr(getattr(rec.train, series))])
            if rec.test is not None:
                for series in LossSummary.SERIES:
                    writer.writerow([rec.epoch, "test", series, repr(getattr(rec.test, series))])


def write_history_curve(history: list[float], series: str, path: Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["epoch", "phase", "series", "value"])
        for epoch, value in enumerate(history):
            writer.writerow([epoch, "train", series, repr(value)])


def _train_triple(cfg: RunConfig, bundle: DataBundle) -> tuple[CooperativeTriple, list[EpochRecord]]:
    triple = build_triple(cfg.network_config(), cfg.train_config())
    return train(triple, bundle.train, cfg.train_config(),
                 testset=bundle.test if cfg.track_test else None)


def _mlp_arm(name: str, features: np.ndarray, labels: np.ndarray, cfg: RunConfig,
             bundle: DataBundle, test_features: np.ndarray | None = None) -> tuple[ArmResult, list[float]]:
    net = train_mlp(features, labels, cfg.train_config())
    test_x = bundle.test.features if test_features is None else test_features
    preds = predict(net, test_x)
    metrics = compute_metrics(bundle.test.labels, preds)
    arm = ArmResult(name=name, metrics=metrics, train_rows=len(features),
                    curve_fits={"log_loss": _safe_fit(net.history)})
    return arm, net.history


def run_experiment_1(cfg: RunConfig, out_dir: str | Path | None = None,
                     bundle: DataBundle | None = None,
                     triple: CooperativeTriple | None = None,
                     records: list[EpochRecord] | None = None) -> ExperimentReport:
    """Cooperative classifier vs autoencoder-latent MLP."""
    t0 = time.time()
    bundle = bundle or resolve_dataset(cfg)
    if triple is None:
        triple, records = _train_triple(cfg, bundle)
    ccnets_metrics = evaluate(triple, bundle.test, threshold=cfg.decision_threshold)
    ccnets_arm = ArmResult(name="ccnets", metrics=ccnets_metrics,
                           train_rows=bundle.train.n_rows,
                           curve_fits=ccnets_curve_fits(records or []))

    ae = train_autoencoder(normal_rows(bundle.train), cfg.train_config(),
                           latent_size=AUTOENCODER_LATENT)
    train_codes = encode_features(ae, bundle.train.features)
    test_codes = encode_features(ae, bundle.test.features)
    ae_arm, mlp_history = _mlp_arm("autoencoder_mlp", train_codes, bundle.train.labels,
                                   cfg, bundle, test_features=test_codes)
    ae_arm.curve_fits["reconstruction"] = _safe_fit(ae.history)

    report = ExperimentReport(
        experiment="exp1", seed=cfg.seed, arms=[ccnets_arm, ae_arm],
        curves={}, config=cfg.as_dict(), source=bundle.source,
        wall_clock_sec=time.time() - t0,
    )
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        if records:
            write_ccnets_curves(records, out / "curves_ccnets.csv")
            report.curves["ccnets"] = "curves_ccnets.csv"
        write_history_curve(ae.history, "reconstruction", out / "curves_autoencoder.csv")
        write_history_curve(mlp_history, "log_loss", out / "curves_autoencoder_mlp.csv")
        report.curves["autoencoder"] = "curves_autoencoder.csv"
        report.curves["autoencoder_mlp"] = "curves_autoencoder_mlp.csv"
        write_report(report, out)
    return report


def run_experiment_2(cfg: RunConfig, out_dir: str | Path | None = None,
                     bundle: DataBundle | None = None,
                     triple: CooperativeTriple | None = None) -> ExperimentReport:
    """MLP trained on original vs generated vs reconstructed features."""
    t0 = time.time()
    bundle = bundle or resolve_dataset(cfg)
    if triple is None:
        triple, _ = _train_triple(cfg, bundle)

    arms = []
    histories = {}
    arm, histories["original"] = _mlp_arm(
        "original", bundle.train.features, bundle.train.labels, cfg, bundle)
    arms.append(arm)
    generated = generate_dataset(triple, bundle.train)
    arm, histories["generation"] = _mlp_arm(
        "generation", generated.features, generated.labels, cfg, bundle)
    arms.append(arm)
    reconstructed = reconstruct_dataset(triple, bundle.train)
    arm, histories["reconstruction"] = _mlp_arm(
        "reconstruction", reconstructed.features, reconstructed.labels, cfg, bundle)
    arms.append(arm)

    report = ExperimentReport(
        experiment="exp2", seed=cfg.seed, arms=arms, curves={},
        config=cfg.as_dict(), source=bundle.source, wall_clock_sec=time.time() - t0,
    )
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        for name, history in histories.items():
            fname = f"curves_mlp_{name}.csv"
            write_history_curve(history, "log_loss", out / fname)
            report.curves[name] = fname
        write_report(report, out)
    return report


def run_experiment_3(cfg: RunConfig, out_dir: str | Path | None = None,
                     bundle: DataBundle | None = None,
                     triple: CooperativeTriple | None = None) -> ExperimentReport:
    """Single generation vs tenfold amplification as MLP training data."""
    t0 = time.time()
    bundle = bundle or resolve_dataset(cfg)
    if triple is None:
        triple, _ = _train_triple(cfg, bundle)

    arms = []
    histories = {}
    generated = generate_dataset(triple, bundle.train)
    arm, histories["generation_x1"] = _mlp_arm(
        "generation_x1", generated.features, generated.labels, cfg, bundle)
    arms.append(arm)
    amplified = amplify(triple, bundle.train, factor=cfg.amplify_factor,
                        noise_sigma=cfg.amplify_noise_sigma, seed=cfg.seed)
    arm, histories[f"generation_x{cfg.amplify_factor}"] = _mlp_arm(
        f"generation_x{cfg.amplify_factor}", amplified.features, amplified.labels, cfg, bundle)
    arms.append(arm)

    report = ExperimentReport(
        experiment="exp3", seed=cfg.seed, arms=arms, curves={},
        config=cfg.as_dict(), source=bundle.source, wall_clock_sec=time.time() - t0,
    )
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        for name, history in histories.items():
            fname = f"curves_mlp_{name}.csv"
            write_history_curve(history, "log_loss", out / fname)
            report.curves[name] = fname
        write_report(report, out)
    return report


def write_report(report: ExperimentReport, out_dir: str | Path) -> Path:
    path = Path(out_dir) / "report.json"
    with open(path, "w") as fh:
        json.dump(report.as_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def load_report(out_dir: str | Path) -> dict:
    with open(Path(out_dir) / "report.json") as fh:
        return json.load(fh)
