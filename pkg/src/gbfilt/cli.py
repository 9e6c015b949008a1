"""Command-line front end.

Subcommands: ``train``, ``predict``, ``eval``, ``synth``,
``export-transforms``. Every command is deterministic given its flags and
seed, writes output files atomically, and maps failures onto a fixed exit
code table:

* 0 — success
* 2 — bad usage, bad configuration, malformed model file, degenerate range
* 3 — data errors (unreadable signals, length mismatches, numeric
  overflow, singular systems)
* 4 — training divergence

Train settings come from an optional JSON config file (TrainConfig field
names as keys) with command-line flags taking precedence.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .bench import (
    CHIRP_TRAIN_SPLIT,
    default_hammerstein,
    generate_hammerstein,
    make_chirp_scene,
    make_example1_datasets,
)
from .errors import (
    ConfigError,
    DataError,
    DivergenceError,
    ModelFormatError,
    NumericOverflowError,
    SingularSystemError,
)
from .io import atomic_write_text, read_signal, write_signal
from .metrics import mse, nmse
from .model import load_model, model_forward, save_model, stage_forward
from .signals import Signal, poly_transform
from .train import TrainConfig, train

__all__ = ["main"]

_CONFIG_KEYS = frozenset(
    (
        "stage_specs",
        "algorithm",
        "max_iters",
        "tol",
        "tol_window",
        "learning_rate",
        "beta1",
        "beta2",
        "adam_eps",
        "weight_decay",
        "lr_schedule",
        "ridge",
        "seed",
        "poly_init",
        "cross_stage_grad",
        "wh_method",
        "divergence_factor",
    )
)


def _parse_stages(texts) -> tuple[tuple[int, int], ...]:
    specs = []
    for text in texts:
        parts = text.split(",")
        try:
            if len(parts) != 2:
                raise ValueError
            specs.append((int(parts[0]), int(parts[1])))
        except ValueError:
            raise ConfigError(
                f"bad stage spec {text!r}; expected DEGREE,ORDER (e.g. 2,16)"
            ) from None
    return tuple(specs)


def _load_config_file(path) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: config must be a JSON object")
    for key in doc:
        if key not in _CONFIG_KEYS:
            raise ConfigError(f"{path}: unknown config key {key!r}")
    return doc


def _train_config(args) -> TrainConfig:
    settings = {}
    if args.config:
        settings.update(_load_config_file(args.config))
    overrides = {
        "algorithm": args.algorithm,
        "max_iters": args.max_iters,
        "tol": args.tol,
        "tol_window": args.tol_window,
        "learning_rate": args.learning_rate,
        "beta1": args.beta1,
        "beta2": args.beta2,
        "adam_eps": args.adam_eps,
        "weight_decay": args.weight_decay,
        "lr_schedule": args.lr_schedule,
        "ridge": args.ridge,
        "seed": args.seed,
        "poly_init": args.poly_init,
        "cross_stage_grad": args.cross_stage_grad,
        "wh_method": args.wh_method,
        "divergence_factor": args.divergence_factor,
    }
    if args.stages:
        overrides["stage_specs"] = _parse_stages(args.stages)
    settings.update({k: v for k, v in overrides.items() if v is not None})
    if "stage_specs" not in settings:
        raise ConfigError("no stage specs given; pass --stages or a config file")
    try:
        return TrainConfig(**settings)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def _default_report_path(model_path: str) -> str:
    base, ext = os.path.splitext(model_path)
    if ext.lower() == ".json":
        return base + "_report.csv"
    return model_path + "_report.csv"


def _write_report(path, stage_mse) -> None:
    lines = ["stage,mse"]
    lines.extend(f"{i + 1},{float(v)!r}" for i, v in enumerate(stage_mse))
    atomic_write_text(path, "\n".join(lines) + "\n")


def cmd_train(args) -> int:
    cfg = _train_config(args)
    x, _ = read_signal(args.input)
    target, _ = read_signal(args.target)
    model, report = train(x, target, cfg)
    save_model(model, args.out_model)
    report_path = args.report or _default_report_path(args.out_model)
    _write_report(report_path, report.stage_mse)
    print(f"wrote model to {args.out_model}")
    print(f"wrote report to {report_path}")
    print(
        f"final training mse {report.stage_mse[-1]!r} "
        f"after {len(report.stage_mse)} stages "
        f"({report.wall_clock:.2f} s)"
    )
    return 0


def cmd_predict(args) -> int:
    model = load_model(args.model)
    x, kind = read_signal(args.input)
    prediction = Signal(model_forward(model, x), sample_rate=x.sample_rate)
    write_signal(args.out, prediction, kind=kind)
    print(f"wrote {len(prediction)} samples to {args.out}")
    return 0


def cmd_eval(args) -> int:
    model = load_model(args.model)
    x, _ = read_signal(args.input)
    target, _ = read_signal(args.target)
    cumulative = np.zeros(len(x.samples))
    stage_scores = []
    for stage in model.stages:
        cumulative += stage_forward(stage, x)
        stage_scores.append(mse(cumulative, target))
    print(f"mse {stage_scores[-1]!r}")
    print(f"nmse {nmse(cumulative, target)!r}")
    for i, score in enumerate(stage_scores):
        print(f"stage_mse {i + 1} {score!r}")
    return 0


def cmd_synth(args) -> int:
    os.makedirs(args.out_dir, exist_ok=True)
    paths = []

    def emit(name, samples, header, rate=None, kind="csv"):
        path = os.path.join(args.out_dir, name)
        write_signal(
            path,
            Signal(samples, sample_rate=rate),
            kind=kind,
            header=header if kind == "csv" else None,
        )
        paths.append(path)

    if args.generator == "example1":
        splits = make_example1_datasets(
            args.seed, n_train=args.n_train, n_val=args.n_val, n_test=args.n_test
        )
        for (u, t), split in zip(splits, ("train", "val", "test")):
            emit(f"example1_{split}_input.csv", u, "input")
            emit(f"example1_{split}_target.csv", t, "target")
    elif args.generator == "hammerstein":
        system = default_hammerstein(noise=args.noise)
        x = np.random.default_rng(args.seed).normal(0.0, 1.0, args.length)
        # Noise drawn from a shifted seed so it is independent of x.
        y = generate_hammerstein(system, x, seed=args.seed + 1)
        emit("hammerstein_input.csv", x, "input")
        emit("hammerstein_target.csv", y, "target")
        model_path = os.path.join(args.out_dir, "hammerstein_true_model.json")
        save_model(system.as_model(), model_path)
        paths.append(model_path)
    else:
        reference, recorded = make_chirp_scene(
            args.seed,
            amplitude=args.amplitude,
            clip_drive=args.clip_drive,
            rir_length=args.rir_length,
            snr_db=args.snr_db,
        )
        emit("chirp_reference.wav", reference.samples,
             None, rate=reference.sample_rate, kind="wav32")
        emit("chirp_recorded.wav", recorded.samples,
             None, rate=recorded.sample_rate, kind="wav32")
        print(f"conventional train/validation split at sample {CHIRP_TRAIN_SPLIT}")
    for path in paths:
        print(f"wrote {path}")
    return 0


def cmd_export_transforms(args) -> int:
    model = load_model(args.model)
    if not np.isfinite(args.x_min) or not np.isfinite(args.x_max):
        raise ConfigError("range bounds must be finite")
    if args.x_max <= args.x_min:
        raise ConfigError(
            f"degenerate range: x-max ({args.x_max}) must exceed x-min ({args.x_min})"
        )
    if args.points < 2:
        raise ConfigError(f"need at least 2 grid points, got {args.points}")
    grid = np.linspace(args.x_min, args.x_max, args.points)
    columns = [grid]
    header = ["x"]
    for i, stage in enumerate(model.stages):
        columns.append(poly_transform(grid, stage.poly))
        header.append(f"stage{i + 1}")
    lines = [",".join(header)]
    for row in zip(*columns):
        lines.append(",".join(repr(float(v)) for v in row))
    atomic_write_text(args.out, "\n".join(lines) + "\n")
    print(f"wrote {len(grid)} grid points x {len(model.stages)} stages to {args.out}")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gbfilt",
        description="Train and run gradient boosted Hammerstein filters.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="fit a boosted filter model to a signal pair")
    p.add_argument("--input", required=True, help="input signal file (CSV or WAV)")
    p.add_argument("--target", required=True, help="target signal file")
    p.add_argument("--out-model", required=True, help="model JSON output path")
    p.add_argument("--report", help="per-stage MSE report CSV path "
                   "(default: derived from --out-model)")
    p.add_argument("--config", help="JSON config file with TrainConfig fields")
    p.add_argument("--stages", nargs="+", metavar="DEGREE,ORDER",
                   help="stage specs, e.g. --stages 1,24 2,16 2,8")
    p.add_argument("--algorithm", choices=("separate", "combined"))
    p.add_argument("--max-iters", type=int)
    p.add_argument("--tol", type=float)
    p.add_argument("--tol-window", type=int)
    p.add_argument("--learning-rate", type=float)
    p.add_argument("--beta1", type=float)
    p.add_argument("--beta2", type=float)
    p.add_argument("--adam-eps", type=float)
    p.add_argument("--weight-decay", type=float)
    p.add_argument("--lr-schedule", choices=("constant", "one_cycle"))
    p.add_argument("--ridge", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--poly-init", choices=("identity", "identity_exact"))
    p.add_argument("--cross-stage-grad", action="store_const", const=True)
    p.add_argument("--wh-method", choices=("auto", "time", "freq"))
    p.add_argument("--divergence-factor", type=float)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="run a model over an input signal")
    p.add_argument("--model", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True,
                   help="output path; written in the input's format")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("eval", help="score a model against a target signal")
    p.add_argument("--model", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--target", required=True)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("synth", help="generate benchmark datasets")
    p.add_argument("generator", choices=("example1", "hammerstein", "chirp"))
    p.add_argument("--out-dir", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n-train", type=int, default=200)
    p.add_argument("--n-val", type=int, default=200)
    p.add_argument("--n-test", type=int, default=200)
    p.add_argument("--length", type=int, default=2048,
                   help="hammerstein: number of input samples")
    p.add_argument("--noise", type=float, default=0.0,
                   help="hammerstein: additive noise standard deviation")
    p.add_argument("--amplitude", type=float, default=0.95)
    p.add_argument("--clip-drive", type=float, default=1.6,
                   help="chirp: soft-clip drive; 0 disables clipping")
    p.add_argument("--rir-length", type=int, default=1600,
                   help="chirp: room response length; 1 gives the identity")
    p.add_argument("--snr-db", type=float, default=40.0)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("export-transforms",
                       help="sample each stage's polynomial over a grid")
    p.add_argument("--model", required=True)
    p.add_argument("--out", required=True, help="CSV output path")
    p.add_argument("--x-min", type=float, default=-1.0)
    p.add_argument("--x-max", type=float, default=1.0)
    p.add_argument("--points", type=int, default=101)
    p.set_defaults(func=cmd_export_transforms)

    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ModelFormatError) as exc:
        print(f"gbfilt: error: {exc}", file=sys.stderr)
        return 2
    except (DataError, NumericOverflowError, SingularSystemError, OSError) as exc:
        print(f"gbfilt: error: {exc}", file=sys.stderr)
        return 3
    except DivergenceError as exc:
        print(f"gbfilt: error: {exc}", file=sys.stderr)
        return 4
