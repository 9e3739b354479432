"""Batch command-line front end.

Subcommands: fit, predict, eval, sweep, components, synth.  Every output
artifact embeds the run configuration (a `# config:` comment line in CSV
files, a "config" key in JSON files), so an artifact can be reproduced
from itself.  All randomness comes from explicit --seed flags.

Exit codes: 0 success, 2 usage, 3 file or data or model-format problems,
4 numeric failures, 5 dimension or shape mismatches.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

import numpy as np

from . import __version__
from .analysis import component_curves, pearson_corr, rmse, sweep, write_sweep_csv
from .data import SYNTH_KINDS, load_csv, load_matrix, save_csv, split, synth
from .errors import (
    DatasetError,
    IllConditionedGramError,
    InvalidHyperparameterError,
    InvalidOrderError,
    ModelFormatError,
    ShapeError,
    UnsupportedDimensionError,
)
from .model import hdmr_fit, hdmr_predict, load_model, save_model

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_NUMERIC = 4
EXIT_DIMENSION = 5


def _int_list(text: str) -> list[int]:
    try:
        values = [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got '{text}'")
    if not values:
        raise argparse.ArgumentTypeError("expected at least one integer")
    return values


def _config_echo(args: argparse.Namespace, keys: list[str]) -> dict:
    config = {"command": args.command, "version": __version__}
    for key in keys:
        config[key] = getattr(args, key.replace("-", "_"))
    return config


def _cmd_fit(args) -> int:
    dataset = load_csv(args.data, target=args.target)
    config = _config_echo(
        args,
        ["data", "target", "d", "n_per_term", "l", "noise", "train", "test",
         "seed", "sobol_skip", "out"],
    )
    if args.train is not None:
        train, test = split(dataset, args.train, args.seed, args.test)
    else:
        train, test = dataset, None
    started = time.perf_counter()
    model = hdmr_fit(
        train, args.d, args.n_per_term, args.l, args.noise,
        sobol_skip=args.sobol_skip, split_seed=args.seed,
    )
    fit_seconds = time.perf_counter() - started
    model.metadata["config"] = config
    train_pred = hdmr_predict(model, train.X)
    report = {
        "config": config,
        "n_train": train.n,
        "n_test": test.n if test is not None else 0,
        "n_features": model.n_features,
        "train_rmse": rmse(train_pred, train.t),
        "train_corr": pearson_corr(train_pred, train.t),
        "test_rmse": None,
        "test_corr": None,
        "fit_seconds": fit_seconds,
    }
    if test is not None:
        test_pred = hdmr_predict(model, test.X)
        report["test_rmse"] = rmse(test_pred, test.t)
        report["test_corr"] = pearson_corr(test_pred, test.t)
    save_model(model, args.out)
    report_path = args.out + ".report.json"
    with open(report_path, "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    if report["test_rmse"] is None:
        print(f"wrote {args.out} (train rmse {report['train_rmse']:.6g})")
    else:
        print(
            f"wrote {args.out} (train rmse {report['train_rmse']:.6g}, "
            f"test rmse {report['test_rmse']:.6g})"
        )
    return EXIT_OK


def _cmd_predict(args) -> int:
    model = load_model(args.model)
    X, _ = load_matrix(args.data)
    config = _config_echo(args, ["model", "data", "out"])
    comments = ["config: " + json.dumps(config, sort_keys=True)]
    names = [f"x{i + 1}" for i in range(model.dimension)] + ["prediction"]
    if X.shape[0] == 0:
        save_csv(args.out, names, [np.empty(0)] * len(names), comments)
        print(f"wrote {args.out} (0 rows)")
        return EXIT_OK
    predictions = hdmr_predict(model, X)
    columns = [X[:, i] for i in range(X.shape[1])] + [predictions]
    save_csv(args.out, names, columns, comments)
    print(f"wrote {args.out} ({X.shape[0]} rows)")
    return EXIT_OK


def _cmd_eval(args) -> int:
    model = load_model(args.model)
    dataset = load_csv(args.data, target=args.target)
    config = _config_echo(
        args, ["model", "data", "target", "train", "test", "seed", "out"]
    )
    report = {"config": config}
    if args.train is not None:
        train, test = split(dataset, args.train, args.seed, args.test)
        report["n_train"] = train.n
        report["n_test"] = test.n
        train_pred = hdmr_predict(model, train.X)
        test_pred = hdmr_predict(model, test.X)
        report["train_rmse"] = rmse(train_pred, train.t)
        report["train_corr"] = pearson_corr(train_pred, train.t)
        report["test_rmse"] = rmse(test_pred, test.t)
        report["test_corr"] = pearson_corr(test_pred, test.t)
    else:
        predictions = hdmr_predict(model, dataset.X)
        report["n"] = dataset.n
        report["rmse"] = rmse(predictions, dataset.t)
        report["corr"] = pearson_corr(predictions, dataset.t)
    text = json.dumps(report, indent=2, sort_keys=True)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    print(text)
    return EXIT_OK


def _cmd_sweep(args) -> int:
    dataset = load_csv(args.data, target=args.target)
    result = sweep(
        dataset,
        d_list=args.d,
        N_list=args.n_per_term,
        repeats=args.repeats,
        train_size=args.train,
        test_size=args.test,
        length_scale=args.l,
        noise=args.noise,
        base_seed=args.seed,
        jobs=args.jobs,
        sobol_skip=args.sobol_skip,
    )
    # jobs is scheduling only; leaving it out keeps artifacts identical
    # across worker counts.
    result.config = {
        **_config_echo(args, ["data", "target", "out_dir"]),
        **result.config,
    }
    os.makedirs(args.out_dir, exist_ok=True)
    records_path = os.path.join(args.out_dir, "sweep.csv")
    summary_path = os.path.join(args.out_dir, "summary.csv")
    write_sweep_csv(result, records_path)
    summary = result.summary()
    save_csv(
        summary_path,
        ["d", "N", "best_test_rmse"],
        [
            np.array([row[0] for row in summary]),
            np.array([row[1] for row in summary]),
            np.array([row[2] for row in summary]),
        ],
        ["config: " + json.dumps(result.config, sort_keys=True)],
    )
    failed = sum(1 for rec in result.records if rec.status != "ok")
    print(f"wrote {records_path} ({len(result.records)} cells, {failed} failed)")
    print(f"wrote {summary_path}")
    return EXIT_OK


def _term_label(curve) -> str:
    base = "*".join(f"x{i + 1}" for i in curve.subset)
    if curve.kind == "original":
        return base
    return f"{base}#{curve.feature_index}"


def _cmd_components(args) -> int:
    model = load_model(args.model)
    curves = component_curves(model, args.grid)
    config = _config_echo(args, ["model", "grid", "out"])
    comments = ["config: " + json.dumps(config, sort_keys=True)]
    to_dir = args.out.endswith(("/", os.sep)) or os.path.isdir(args.out)
    if to_dir:
        os.makedirs(args.out, exist_ok=True)
        for curve in curves:
            label = _term_label(curve)
            safe = label.replace("*", "-").replace("#", "-n")
            path = os.path.join(args.out, f"term_{safe}.csv")
            save_csv(
                path,
                ["term", "grid", "value"],
                [[label] * len(curve.grid), curve.grid, curve.values],
                comments,
            )
        print(f"wrote {len(curves)} curve files to {args.out}")
    else:
        terms, grids, values = [], [], []
        for curve in curves:
            label = _term_label(curve)
            terms.extend([label] * len(curve.grid))
            grids.append(curve.grid)
            values.append(curve.values)
        save_csv(
            args.out,
            ["term", "grid", "value"],
            [terms, np.concatenate(grids), np.concatenate(values)],
            comments,
        )
        print(f"wrote {args.out} ({len(curves)} curves)")
    return EXIT_OK


def _cmd_synth(args) -> int:
    dataset = synth(args.kind, args.dim, args.n, args.seed, args.noise_std)
    config = _config_echo(args, ["kind", "dim", "n", "seed", "noise_std", "out"])
    save_csv(
        args.out,
        dataset.column_names + [dataset.target_name],
        [dataset.X[:, i] for i in range(dataset.dimension)] + [dataset.t],
        ["config: " + json.dumps(config, sort_keys=True)],
    )
    print(f"wrote {args.out} ({dataset.n} rows)")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hdmrnet",
        description="Orders-of-coupling surrogate models for scattered data, "
        "fitted without nonlinear optimization.",
    )
    parser.add_argument("--version", action="version", version=f"hdmrnet {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    fit = commands.add_parser("fit", help="fit a surrogate and write a model file")
    fit.add_argument("--data", required=True, help="training CSV")
    fit.add_argument("--target", default=None, help="target column name (default: last)")
    fit.add_argument("--d", type=int, required=True, help="coupling order")
    fit.add_argument("--n-per-term", type=int, required=True,
                     help="neurons per coupled term (unused when --d 1)")
    fit.add_argument("--l", type=float, required=True, help="kernel length scale")
    fit.add_argument("--noise", type=float, default=1e-6, help="noise variance")
    fit.add_argument("--train", type=int, default=None,
                     help="training rows; remainder becomes the test set")
    fit.add_argument("--test", type=int, default=None, help="cap on test rows")
    fit.add_argument("--seed", type=int, required=True, help="split seed")
    fit.add_argument("--sobol-skip", type=int, default=0,
                     help="skip this many initial direction points")
    fit.add_argument("--out", required=True, help="model file path")
    fit.set_defaults(func=_cmd_fit)

    predict = commands.add_parser("predict", help="evaluate a model on new points")
    predict.add_argument("--model", required=True)
    predict.add_argument("--data", required=True, help="points CSV, no target column")
    predict.add_argument("--out", required=True, help="predictions CSV")
    predict.set_defaults(func=_cmd_predict)

    evaluate = commands.add_parser("eval", help="report rmse and correlation")
    evaluate.add_argument("--model", required=True)
    evaluate.add_argument("--data", required=True, help="CSV with target column")
    evaluate.add_argument("--target", default=None)
    evaluate.add_argument("--train", type=int, default=None,
                          help="re-split as in fit and report both sides")
    evaluate.add_argument("--test", type=int, default=None)
    evaluate.add_argument("--seed", type=int, default=None,
                          help="split seed (required with --train)")
    evaluate.add_argument("--out", default=None, help="also write the report JSON here")
    evaluate.set_defaults(func=_cmd_eval)

    sweep_cmd = commands.add_parser("sweep", help="grid of fits over d and N")
    sweep_cmd.add_argument("--data", required=True)
    sweep_cmd.add_argument("--target", default=None)
    sweep_cmd.add_argument("--d", type=_int_list, required=True,
                           help="comma-separated coupling orders, e.g. 1,2,3")
    sweep_cmd.add_argument("--n-per-term", type=_int_list, required=True,
                           help="comma-separated neuron counts, e.g. 20,40")
    sweep_cmd.add_argument("--repeats", type=int, default=3)
    sweep_cmd.add_argument("--train", type=int, required=True)
    sweep_cmd.add_argument("--test", type=int, default=None)
    sweep_cmd.add_argument("--l", type=float, required=True)
    sweep_cmd.add_argument("--noise", type=float, default=1e-6)
    sweep_cmd.add_argument("--seed", type=int, required=True,
                           help="base split seed; repeat r uses seed + r")
    sweep_cmd.add_argument("--jobs", type=int, default=1)
    sweep_cmd.add_argument("--sobol-skip", type=int, default=0)
    sweep_cmd.add_argument("--out-dir", required=True)
    sweep_cmd.set_defaults(func=_cmd_sweep)

    components = commands.add_parser(
        "components", help="sample neuron activation curves from a model"
    )
    components.add_argument("--model", required=True)
    components.add_argument("--grid", type=int, default=201)
    components.add_argument("--out", required=True,
                            help="CSV path, or a directory for one file per term")
    components.set_defaults(func=_cmd_components)

    synth_cmd = commands.add_parser("synth", help="generate a benchmark dataset")
    synth_cmd.add_argument("--kind", required=True, choices=SYNTH_KINDS)
    synth_cmd.add_argument("--dim", type=int, required=True)
    synth_cmd.add_argument("--n", type=int, required=True)
    synth_cmd.add_argument("--seed", type=int, required=True)
    synth_cmd.add_argument("--noise-std", type=float, default=0.0)
    synth_cmd.add_argument("--out", required=True)
    synth_cmd.set_defaults(func=_cmd_synth)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "train", None) is not None and args.command == "eval":
        if args.seed is None:
            parser.error("eval --train requires --seed")
    try:
        return args.func(args)
    except (DatasetError, ModelFormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (IllConditionedGramError, InvalidHyperparameterError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ShapeError, InvalidOrderError, UnsupportedDimensionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIMENSION
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
