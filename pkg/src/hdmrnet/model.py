"""End-to-end surrogate pipeline: feature map -> unit-cube scaling -> additive GPR.

A fitted model evaluates as a single-hidden-layer network whose hidden
weights are the rule-based sparse rows of the feature map and whose
neuron activation functions are the per-feature component functions of
the additive GPR.  The prediction therefore decomposes exactly into
per-coupling-term contributions plus a constant offset.

Model files are JSON documents with a fixed top-level layout
(format_version, metadata, feature_map, scaler, gpr, checksum).  Floats
are serialized as shortest round-trip decimals, so a save/load round trip
reproduces predictions bit-exactly.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from dataclasses import dataclass

import numpy as np

from .coupling import (
    KIND_COUPLED,
    KIND_ORIGINAL,
    FeatureMap,
    FeatureRow,
    build_feature_map,
    map_features,
)
from .data import Dataset
from .errors import ModelFormatError, ShapeError
from .gpr import AdditiveGprModel, gpr_component, gpr_fit, gpr_predict

FORMAT_VERSION = 1


@dataclass
class Scaler:
    """Per-feature affine map of the training range onto [0, 1].

    Constant features (max == min) map to 0.5.  Test-time values outside
    the training range are extrapolated, never clipped.
    """

    mins: np.ndarray
    maxs: np.ndarray


def fit_scaler(Y: np.ndarray) -> Scaler:
    Y = np.asarray(Y, dtype=np.float64)
    if Y.ndim != 2 or Y.shape[0] < 1:
        raise ShapeError(f"Y must be a non-empty 2-D matrix, got shape {Y.shape}")
    return Scaler(mins=Y.min(axis=0), maxs=Y.max(axis=0))


def apply_scaler(scaler: Scaler, Y: np.ndarray) -> np.ndarray:
    Y = np.asarray(Y, dtype=np.float64)
    if Y.ndim != 2 or Y.shape[1] != scaler.mins.shape[0]:
        raise ShapeError(
            f"Y must have {scaler.mins.shape[0]} columns, got shape {Y.shape}"
        )
    span = scaler.maxs - scaler.mins
    constant = span == 0.0
    safe_span = np.where(constant, 1.0, span)
    scaled = (Y - scaler.mins) / safe_span
    scaled[:, constant] = 0.5
    return scaled


@dataclass
class HdmrModel:
    """Fitted surrogate: feature map + scaler + additive GPR + provenance."""

    feature_map: FeatureMap
    scaler: Scaler
    gpr: AdditiveGprModel
    metadata: dict

    @property
    def dimension(self) -> int:
        return self.feature_map.dimension

    @property
    def n_features(self) -> int:
        return self.feature_map.n_features


def hdmr_fit(
    train: Dataset,
    order: int,
    neurons_per_term: int,
    length_scale: float,
    noise: float = 1e-6,
    sobol_skip: int = 0,
    split_seed: int | None = None,
) -> HdmrModel:
    """Fit the full pipeline on a training dataset.

    Deterministic given (dataset contents, order, neurons_per_term,
    length_scale, noise, sobol_skip).  `split_seed` is provenance only and
    recorded in the model metadata.
    """
    if train.n < 2:
        raise ValueError(f"training set needs at least 2 rows, got {train.n}")
    fmap = build_feature_map(train.dimension, order, neurons_per_term, sobol_skip)
    Y = map_features(fmap, train.X)
    scaler = fit_scaler(Y)
    gpr = gpr_fit(apply_scaler(scaler, Y), train.t, length_scale, noise)
    metadata = {
        "dimension": train.dimension,
        "order": order,
        "neurons_per_term": neurons_per_term,
        "length_scale": float(length_scale),
        "noise": float(noise),
        "sobol_skip": sobol_skip,
        "split_seed": split_seed,
        "dataset_fingerprint": train.fingerprint(),
    }
    return HdmrModel(feature_map=fmap, scaler=scaler, gpr=gpr, metadata=metadata)


def hdmr_predict(model: HdmrModel, X: np.ndarray) -> np.ndarray:
    """Evaluate the surrogate at each row of X."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != model.dimension:
        raise ShapeError(f"X must be (n, {model.dimension}), got shape {X.shape}")
    Y = apply_scaler(model.scaler, map_features(model.feature_map, X))
    return gpr_predict(model.gpr, Y)


def term_values(model: HdmrModel, X: np.ndarray) -> dict[tuple[int, ...], np.ndarray]:
    """Per-coupling-term contributions at each row of X.

    Keys are coordinate subsets: the D singletons of the original rows
    plus, for order >= 2, the C(D, d) coupled subsets.  Values sum (with
    the GPR offset) to `hdmr_predict` up to summation order.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != model.dimension:
        raise ShapeError(f"X must be (n, {model.dimension}), got shape {X.shape}")
    Y = apply_scaler(model.scaler, map_features(model.feature_map, X))
    out: dict[tuple[int, ...], np.ndarray] = {}
    for j, row in enumerate(model.feature_map.rows):
        contrib = gpr_component(model.gpr, j, Y[:, j])
        if row.subset in out:
            out[row.subset] += contrib
        else:
            out[row.subset] = contrib
    return out


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def _canonical_bytes(document: dict) -> bytes:
    return json.dumps(
        document, sort_keys=True, separators=(",", ":"), allow_nan=False
    ).encode("utf-8")


def _floats(a: np.ndarray) -> list:
    return [float(v) for v in np.asarray(a).ravel()]


def _model_document(model: HdmrModel) -> dict:
    fmap = model.feature_map
    rows = [
        {
            "subset": list(row.subset),
            "kind": row.kind,
            "sobol_index": row.sobol_index,
            "values": [float(row.weights[i]) for i in row.subset],
        }
        for row in fmap.rows
    ]
    return {
        "format_version": FORMAT_VERSION,
        "metadata": model.metadata,
        "feature_map": {
            "dimension": fmap.dimension,
            "order": fmap.order,
            "neurons_per_term": fmap.neurons_per_term,
            "sobol_skip": fmap.sobol_skip,
            "rows": rows,
        },
        "scaler": {
            "mins": _floats(model.scaler.mins),
            "maxs": _floats(model.scaler.maxs),
        },
        "gpr": {
            "length_scale": model.gpr.length_scale,
            "noise": model.gpr.noise,
            "effective_noise": model.gpr.effective_noise,
            "target_offset": model.gpr.target_offset,
            "alpha": _floats(model.gpr.alpha),
            "Ytrain": [_floats(r) for r in model.gpr.Ytrain],
        },
    }


def save_model(model: HdmrModel, path: str) -> None:
    """Write the model file atomically; no partial file is ever left at `path`."""
    document = _model_document(model)
    document["checksum"] = hashlib.sha256(_canonical_bytes(document)).hexdigest()
    payload = _canonical_bytes(document)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _require(mapping, key, section):
    if not isinstance(mapping, dict) or key not in mapping:
        raise ModelFormatError(f"{section}: missing field '{key}'")
    return mapping[key]


def load_model(path: str) -> HdmrModel:
    """Read a model file, verifying structure, version, and checksum."""
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        raise ModelFormatError(f"cannot read model file: {exc}") from exc
    try:
        document = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"document: not valid JSON ({exc.msg} at char {exc.pos})") from exc
    if not isinstance(document, dict):
        raise ModelFormatError("document: top level must be an object")

    version = _require(document, "format_version", "document")
    if not isinstance(version, int):
        raise ModelFormatError("format_version: must be an integer")
    if version > FORMAT_VERSION:
        raise ModelFormatError(
            f"format_version: file has version {version}, this build reads <= {FORMAT_VERSION}"
        )

    stored_checksum = _require(document, "checksum", "document")
    unsigned = {k: v for k, v in document.items() if k != "checksum"}
    actual = hashlib.sha256(_canonical_bytes(unsigned)).hexdigest()
    if actual != stored_checksum:
        raise ModelFormatError("checksum: stored checksum does not match file contents")

    metadata = _require(document, "metadata", "document")

    fm = _require(document, "feature_map", "document")
    dimension = _require(fm, "dimension", "feature_map")
    rows = []
    for i, entry in enumerate(_require(fm, "rows", "feature_map")):
        subset = tuple(_require(entry, "subset", f"feature_map.rows[{i}]"))
        kind = _require(entry, "kind", f"feature_map.rows[{i}]")
        if kind not in (KIND_ORIGINAL, KIND_COUPLED):
            raise ModelFormatError(f"feature_map.rows[{i}]: unknown kind '{kind}'")
        values = _require(entry, "values", f"feature_map.rows[{i}]")
        if len(values) != len(subset):
            raise ModelFormatError(
                f"feature_map.rows[{i}]: {len(values)} values for {len(subset)} subset indices"
            )
        weights = np.zeros(dimension)
        weights[list(subset)] = values
        rows.append(
            FeatureRow(
                weights=weights,
                subset=subset,
                kind=kind,
                sobol_index=entry.get("sobol_index"),
            )
        )
    fmap = FeatureMap(
        dimension=dimension,
        order=_require(fm, "order", "feature_map"),
        neurons_per_term=_require(fm, "neurons_per_term", "feature_map"),
        sobol_skip=_require(fm, "sobol_skip", "feature_map"),
        rows=rows,
    )

    sc = _require(document, "scaler", "document")
    scaler = Scaler(
        mins=np.asarray(_require(sc, "mins", "scaler"), dtype=np.float64),
        maxs=np.asarray(_require(sc, "maxs", "scaler"), dtype=np.float64),
    )

    gp = _require(document, "gpr", "document")
    gpr = AdditiveGprModel(
        Ytrain=np.asarray(_require(gp, "Ytrain", "gpr"), dtype=np.float64),
        alpha=np.asarray(_require(gp, "alpha", "gpr"), dtype=np.float64),
        length_scale=_require(gp, "length_scale", "gpr"),
        noise=_require(gp, "noise", "gpr"),
        effective_noise=_require(gp, "effective_noise", "gpr"),
        target_offset=_require(gp, "target_offset", "gpr"),
    )
    if gpr.Ytrain.ndim != 2:
        raise ModelFormatError("gpr: Ytrain must be a 2-D matrix")

    n_features = fmap.n_features
    if gpr.n_features != n_features or scaler.mins.shape[0] != n_features:
        raise ModelFormatError(
            f"document: inconsistent feature counts (feature_map {n_features}, "
            f"gpr {gpr.n_features}, scaler {scaler.mins.shape[0]})"
        )
    return HdmrModel(feature_map=fmap, scaler=scaler, gpr=gpr, metadata=metadata)
