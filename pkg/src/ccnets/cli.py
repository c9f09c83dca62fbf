"""Command-line surface: data preparation, training, generation, baselines,
and the three experiments. Exit codes: 0 success, 1 usage/config error,
2 data/schema error, 3 numeric failure."""
from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from .baselines import train_autoencoder, train_mlp
from .checkpoint import load_triple, save_autoencoder, save_mlp, save_triple
from .config import RunConfig
from .data import load_csv, save_csv
from .errors import (
    CcnetsError,
    ConfigError,
    DimensionError,
    DomainError,
    NumericError,
    ParseError,
    SchemaError,
)
from .experiments import (
    load_report,
    normal_rows,
    resolve_dataset,
    run_experiment_1,
    run_experiment_2,
    run_experiment_3,
    write_ccnets_curves,
)
from .networks import amplify, generate_dataset
from .trainer import build_triple, evaluate, train


def _load_config(args) -> RunConfig:
    cfg = RunConfig.from_json(args.config) if args.config else RunConfig()
    if getattr(args, "seed", None) is not None:
        cfg.seed = args.seed
        cfg.dataset.fallback_synth.seed = args.seed
    if getattr(args, "rows", None) is not None:
        cfg.dataset.rows = args.rows
    return cfg


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _print_metrics(label: str, m) -> None:
    print(f"{label}: f1={m.f1:.4f} precision={m.precision:.4f} recall={m.recall:.4f} "
          f"(tp={m.tp} fp={m.fp} fn={m.fn} tn={m.tn})")


def cmd_prepare_data(args) -> int:
    cfg = _load_config(args)
    out = _out_dir(args)
    bundle = resolve_dataset(cfg)
    save_csv(bundle.train, out / "train.csv")
    save_csv(bundle.test, out / "test.csv")
    stats = {"mean": bundle.stats.mean.ravel().tolist(),
             "std": bundle.stats.std.ravel().tolist(),
             "source": bundle.source}
    (out / "normalization.json").write_text(json.dumps(stats, indent=2) + "\n")
    print(f"prepared {bundle.train.n_rows} train rows "
          f"({bundle.train.positive_count} fraud) and {bundle.test.n_rows} test rows "
          f"({bundle.test.positive_count} fraud) from {bundle.source}")
    return 0


def cmd_train(args) -> int:
    cfg = _load_config(args)
    out = _out_dir(args)
    bundle = resolve_dataset(cfg)
    triple = build_triple(cfg.network_config(), cfg.train_config())
    triple, records = train(triple, bundle.train, cfg.train_config(),
                            testset=bundle.test if cfg.track_test else None)
    save_triple(triple, out / "ckpt_ccnets.json", cfg.network_config(), seed=cfg.seed,
                extra_config={"run": cfg.as_dict()})
    write_ccnets_curves(records, out / "curves_ccnets.csv")
    m = evaluate(triple, bundle.test, threshold=cfg.decision_threshold)
    _print_metrics("ccnets", m)
    print(f"checkpoint: {out / 'ckpt_ccnets.json'}")
    return 0


def _require_triple(args):
    if not args.ckpt:
        raise ConfigError("--ckpt is required for this command")
    triple, config = load_triple(args.ckpt)
    return triple, config


def cmd_eval(args) -> int:
    cfg = _load_config(args)
    triple, _ = _require_triple(args)
    bundle = resolve_dataset(cfg)
    threshold = args.threshold if args.threshold is not None else cfg.decision_threshold
    m = evaluate(triple, bundle.test, threshold=threshold)
    _print_metrics("ccnets", m)
    out = _out_dir(args)
    (out / "metrics.json").write_text(json.dumps(m.as_dict(), indent=2, sort_keys=True) + "\n")
    return 0


def cmd_generate(args) -> int:
    cfg = _load_config(args)
    triple, _ = _require_triple(args)
    out = _out_dir(args)
    bundle = resolve_dataset(cfg)
    generated = generate_dataset(triple, bundle.train)
    save_csv(generated, out / "generated.csv")
    print(f"wrote {generated.n_rows} generated rows to {out / 'generated.csv'}")
    return 0


def cmd_amplify(args) -> int:
    cfg = _load_config(args)
    triple, _ = _require_triple(args)
    out = _out_dir(args)
    bundle = resolve_dataset(cfg)
    factor = args.factor if args.factor is not None else cfg.amplify_factor
    sigma = args.noise_sigma if args.noise_sigma is not None else cfg.amplify_noise_sigma
    amplified = amplify(triple, bundle.train, factor=factor, noise_sigma=sigma, seed=cfg.seed)
    save_csv(amplified, out / "amplified.csv")
    print(f"wrote {amplified.n_rows} rows ({factor}x) to {out / 'amplified.csv'}")
    return 0


def cmd_train_ae(args) -> int:
    cfg = _load_config(args)
    out = _out_dir(args)
    bundle = resolve_dataset(cfg)
    ae = train_autoencoder(normal_rows(bundle.train), cfg.train_config())
    save_autoencoder(ae, out / "ckpt_autoencoder.json", seed=cfg.seed)
    print(f"autoencoder final train loss {ae.history[-1]:.6f}; "
          f"checkpoint: {out / 'ckpt_autoencoder.json'}")
    return 0


def _load_own_header_csv(path: str):
    with open(path, newline="") as fh:
        header = next(csv.reader(fh))
    return load_csv(path, schema=[h.strip() for h in header])


def cmd_train_mlp(args) -> int:
    cfg = _load_config(args)
    out = _out_dir(args)
    bundle = resolve_dataset(cfg)
    if args.train_csv:
        train_ds = _load_own_header_csv(args.train_csv)
    else:
        train_ds = bundle.train
    mlp = train_mlp(train_ds.features, train_ds.labels, cfg.train_config())
    save_mlp(mlp, out / "ckpt_mlp.json", seed=cfg.seed)
    from .baselines import predict
    from .metrics import compute_metrics
    m = compute_metrics(bundle.test.labels, predict(mlp, bundle.test.features))
    _print_metrics("mlp", m)
    print(f"checkpoint: {out / 'ckpt_mlp.json'}")
    return 0


def _run_experiment(args, runner, name: str) -> int:
    cfg = _load_config(args)
    out = _out_dir(args)
    triple = None
    if getattr(args, "ckpt", None):
        triple, _ = load_triple(args.ckpt)
    report = runner(cfg, out_dir=out, triple=triple)
    for arm in report.arms:
        _print_metrics(f"{name}/{arm.name}", arm.metrics)
    print(f"report: {out / 'report.json'}")
    return 0


def cmd_exp1(args) -> int:
    return _run_experiment(args, run_experiment_1, "exp1")


def cmd_exp2(args) -> int:
    return _run_experiment(args, run_experiment_2, "exp2")


def cmd_exp3(args) -> int:
    return _run_experiment(args, run_experiment_3, "exp3")


def cmd_report(args) -> int:
    report = load_report(args.out)
    print(f"experiment {report['experiment']} (seed {report['seed']}, "
          f"source {report['source']}, {report['wall_clock_sec']:.1f}s)")
    for arm in report["arms"]:
        print(f"  {arm['name']}: f1={arm['f1']:.4f} precision={arm['precision']:.4f} "
              f"recall={arm['recall']:.4f} train_rows={arm['train_rows']}")
        for series, fit in (arm.get("curve_fits") or {}).items():
            if fit:
                print(f"    {series}: slope={fit['slope']:+.4f} r2={fit['r2']:.3f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ccnets",
        description="Cooperative generative classifier: training, generation, "
                    "baselines, and the fraud experiments.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, ckpt=False):
        p.add_argument("--config", help="JSON run configuration")
        p.add_argument("--out", default="runs", help="output directory (default: runs)")
        p.add_argument("--seed", type=int, help="override the config seed")
        p.add_argument("--rows", type=int, help="subsample: keep only the first N rows")
        if ckpt:
            p.add_argument("--ckpt", help="model checkpoint to load")

    common(sub.add_parser("prepare-data", help="split, normalize, and export the dataset"))
    common(sub.add_parser("train", help="train the cooperative triple"))
    p = sub.add_parser("eval", help="evaluate a checkpoint on the test split")
    common(p, ckpt=True)
    p.add_argument("--threshold", type=float, help="decision threshold on the probability scale")
    p = sub.add_parser("generate", help="producer output over the train split")
    common(p, ckpt=True)
    p = sub.add_parser("amplify", help="repeat generation with latent jitter")
    common(p, ckpt=True)
    p.add_argument("--factor", type=int, help="volume multiplier (default from config)")
    p.add_argument("--noise-sigma", type=float, help="latent jitter scale")
    common(sub.add_parser("train-ae", help="train the autoencoder baseline"))
    p = sub.add_parser("train-mlp", help="train the MLP baseline")
    common(p)
    p.add_argument("--train-csv", help="train on this CSV instead of the resolved split")
    p = sub.add_parser("exp1", help="cooperative classifier vs autoencoder pipeline")
    common(p, ckpt=True)
    p = sub.add_parser("exp2", help="MLP on original vs generated vs reconstructed data")
    common(p, ckpt=True)
    p = sub.add_parser("exp3", help="single vs tenfold generation")
    common(p, ckpt=True)
    p = sub.add_parser("report", help="print a run directory's report")
    p.add_argument("--out", default="runs", help="run directory holding report.json")

    parser.set_defaults(func=None)
    for name, fn in [("prepare-data", cmd_prepare_data), ("train", cmd_train),
                     ("eval", cmd_eval), ("generate", cmd_generate),
                     ("amplify", cmd_amplify), ("train-ae", cmd_train_ae),
                     ("train-mlp", cmd_train_mlp), ("exp1", cmd_exp1),
                     ("exp2", cmd_exp2), ("exp3", cmd_exp3), ("report", cmd_report)]:
        sub.choices[name].set_defaults(func=fn)
    return parser


def cli_main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return 1
    except (SchemaError, ParseError, DomainError, DimensionError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2
    except NumericError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 3
    except FileNotFoundError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2
    except CcnetsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(cli_main())
