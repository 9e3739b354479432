"""Model quality tools: metrics, coupling-order sweeps, term importance,
activation curves, and a validation grid search for the length scale.

Sweep results are deterministic functions of (dataset, grid, seeds); the
worker count only changes scheduling, so CSV outputs are bit-identical
across runs and across `jobs` settings except for the wall_s column.
"""

from __future__ import annotations

import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .data import Dataset, split
from .errors import DatasetError, InvalidHyperparameterError, ShapeError
from .gpr import gpr_component
from .model import HdmrModel, hdmr_fit, hdmr_predict, term_values

SWEEP_COLUMNS = (
    "d",
    "N",
    "repeat",
    "seed",
    "train_rmse",
    "test_rmse",
    "train_corr",
    "test_corr",
    "wall_s",
    "status",
)


def rmse(predicted: np.ndarray, actual: np.ndarray) -> float:
    predicted = np.asarray(predicted, dtype=np.float64)
    actual = np.asarray(actual, dtype=np.float64)
    if predicted.shape != actual.shape or predicted.ndim != 1 or predicted.size == 0:
        raise ShapeError(
            f"need equal non-empty 1-D arrays, got {predicted.shape} and {actual.shape}"
        )
    diff = predicted - actual
    return float(np.sqrt(np.mean(diff * diff)))


def pearson_corr(predicted: np.ndarray, actual: np.ndarray) -> float:
    predicted = np.asarray(predicted, dtype=np.float64)
    actual = np.asarray(actual, dtype=np.float64)
    if predicted.shape != actual.shape or predicted.ndim != 1 or predicted.size < 2:
        raise ShapeError(
            f"need equal 1-D arrays with >= 2 entries, got {predicted.shape} and {actual.shape}"
        )
    va = predicted - predicted.mean()
    vb = actual - actual.mean()
    na = float(np.sqrt(va @ va))
    nb = float(np.sqrt(vb @ vb))
    if na == 0.0 or nb == 0.0:
        raise DatasetError("correlation undefined: an input has zero variance")
    return float((va @ vb) / (na * nb))


@dataclass
class SweepRecord:
    d: int
    N: int
    repeat: int
    seed: int
    train_rmse: float
    test_rmse: float
    train_corr: float
    test_corr: float
    wall_s: float
    status: str


@dataclass
class SweepResult:
    records: list[SweepRecord]
    config: dict = field(default_factory=dict)

    def summary(self) -> list[tuple[int, int, float]]:
        """Best (lowest) test RMSE per (d, N) cell over repeats."""
        best: dict[tuple[int, int], float] = {}
        for rec in self.records:
            if rec.status != "ok":
                continue
            key = (rec.d, rec.N)
            if key not in best or rec.test_rmse < best[key]:
                best[key] = rec.test_rmse
        return [(d, N, best[(d, N)]) for d, N in sorted(best)]


def _run_cell(args) -> SweepRecord:
    (dataset, d, N, repeat, seed, train_size, test_size, length_scale,
     noise, sobol_skip) = args
    started = time.perf_counter()
    try:
        train, test = split(dataset, train_size, seed, test_size)
        model = hdmr_fit(
            train, d, N, length_scale, noise,
            sobol_skip=sobol_skip, split_seed=seed,
        )
        train_pred = hdmr_predict(model, train.X)
        test_pred = hdmr_predict(model, test.X)
        record = SweepRecord(
            d=d, N=N, repeat=repeat, seed=seed,
            train_rmse=rmse(train_pred, train.t),
            test_rmse=rmse(test_pred, test.t),
            train_corr=pearson_corr(train_pred, train.t),
            test_corr=pearson_corr(test_pred, test.t),
            wall_s=time.perf_counter() - started,
            status="ok",
        )
    except Exception as exc:
        record = SweepRecord(
            d=d, N=N, repeat=repeat, seed=seed,
            train_rmse=float("nan"), test_rmse=float("nan"),
            train_corr=float("nan"), test_corr=float("nan"),
            wall_s=time.perf_counter() - started,
            status=f"error:{type(exc).__name__}",
        )
    return record


def sweep(
    dataset: Dataset,
    d_list: list[int],
    N_list: list[int],
    repeats: int,
    train_size: int,
    test_size: int | None,
    length_scale: float,
    noise: float,
    base_seed: int,
    jobs: int = 1,
    sobol_skip: int = 0,
) -> SweepResult:
    """Fit every (d, N, repeat) cell and collect train/test metrics.

    Repeat r uses split seed base_seed + r, shared across cells so that
    different (d, N) settings are compared on identical splits.  Failed
    cells are kept with status "error:<type>" and NaN metrics.
    """
    if repeats < 1:
        raise ValueError(f"repeats must be >= 1, got {repeats}")
    if jobs < 1:
        raise ValueError(f"jobs must be >= 1, got {jobs}")
    tasks = [
        (dataset, d, N, repeat, base_seed + repeat, train_size, test_size,
         length_scale, noise, sobol_skip)
        for d in d_list
        for N in N_list
        for repeat in range(repeats)
    ]
    if jobs == 1:
        records = [_run_cell(task) for task in tasks]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(_run_cell, tasks))
    records.sort(key=lambda r: (r.d, r.N, r.repeat))
    config = {
        "d_list": list(d_list),
        "N_list": list(N_list),
        "repeats": repeats,
        "train_size": train_size,
        "test_size": test_size,
        "length_scale": float(length_scale),
        "noise": float(noise),
        "base_seed": base_seed,
        "sobol_skip": sobol_skip,
        "dataset": dataset.fingerprint(),
    }
    return SweepResult(records=records, config=config)


def write_sweep_csv(result: SweepResult, path: str) -> None:
    """One row per cell, with the sweep configuration echoed as a comment."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# config: " + json.dumps(result.config, sort_keys=True) + "\n")
        fh.write(",".join(SWEEP_COLUMNS) + "\n")
        for rec in result.records:
            fh.write(
                f"{rec.d},{rec.N},{rec.repeat},{rec.seed},"
                f"{rec.train_rmse!r},{rec.test_rmse!r},"
                f"{rec.train_corr!r},{rec.test_corr!r},"
                f"{rec.wall_s!r},{rec.status}\n"
            )


def importance(model: HdmrModel, X: np.ndarray) -> list[tuple[tuple[int, ...], float]]:
    """Rank coupling terms by the standard deviation of their contribution
    over the rows of X; descending, ties broken by subset order."""
    contributions = term_values(model, X)
    ranked = [
        (subset, float(np.std(values))) for subset, values in contributions.items()
    ]
    ranked.sort(key=lambda item: (-item[1], item[0]))
    return ranked


@dataclass
class ComponentCurve:
    """One neuron's activation sampled on the scaled feature interval [0, 1]."""

    feature_index: int
    subset: tuple[int, ...]
    kind: str
    grid: np.ndarray
    values: np.ndarray
    train_std: float


def component_curves(model: HdmrModel, grid_size: int = 201) -> list[ComponentCurve]:
    if grid_size < 2:
        raise ValueError(f"grid_size must be >= 2, got {grid_size}")
    grid = np.linspace(0.0, 1.0, grid_size)
    curves = []
    for j, row in enumerate(model.feature_map.rows):
        values = gpr_component(model.gpr, j, grid)
        on_train = gpr_component(model.gpr, j, model.gpr.Ytrain[:, j])
        curves.append(
            ComponentCurve(
                feature_index=j,
                subset=row.subset,
                kind=row.kind,
                grid=grid,
                values=values,
                train_std=float(np.std(on_train)),
            )
        )
    return curves


def grid_search_l(
    train: Dataset,
    order: int,
    neurons_per_term: int,
    candidates: list[float],
    noise: float,
    seed: int,
    val_fraction: float = 0.2,
) -> tuple[float, list[tuple[float, float]]]:
    """Pick a length scale by RMSE on an inner validation split.

    The inner split uses seed + 1 so it never coincides with the outer
    train/test split of the same seed.  Ties go to the larger (smoother)
    candidate.  Candidates whose fit fails are scored as infinity.
    """
    if not candidates:
        raise InvalidHyperparameterError("no length scale candidates given")
    if not 0.0 < val_fraction < 1.0:
        raise InvalidHyperparameterError(
            f"val_fraction must be in (0, 1), got {val_fraction}"
        )
    val_size = max(1, int(round(val_fraction * train.n)))
    if val_size >= train.n:
        raise DatasetError(f"{train.n} rows is too few for a validation split")
    inner, val = split(train, train.n - val_size, seed + 1, val_size)
    results = []
    for l in sorted(candidates):
        try:
            model = hdmr_fit(inner, order, neurons_per_term, l, noise)
            score = rmse(hdmr_predict(model, val.X), val.t)
        except Exception:
            score = float("inf")
        results.append((float(l), score))
    best_l, best_score = results[0]
    for l, score in results[1:]:
        if score <= best_score:
            best_l, best_score = l, score
    if not np.isfinite(best_score):
        raise InvalidHyperparameterError(
            "no candidate length scale produced a stable fit"
        )
    return best_l, results
