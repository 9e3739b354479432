"""Coordinate-subset enumeration and the rule-based sparse weight matrix.

A feature map turns D original coordinates into F redundant coordinates
y = Wx.  The first D rows of W are the identity (the original coordinates
are kept as features); every further row has exactly d nonzero entries,
drawn from one shared d-dimensional Sobol stream, placed on one of the
C(D, d) coordinate subsets.  Each subset receives the same number N of
rows, so F = D + N * C(D, d) for d >= 2 and F = D for d = 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from math import comb

import numpy as np

from .errors import InvalidOrderError, ShapeError
from .sobol import SobolStream

KIND_ORIGINAL = "original"
KIND_COUPLED = "coupled"


@dataclass
class FeatureRow:
    """One row of the weight matrix, tagged with its coordinate subset."""

    weights: np.ndarray  # length-D, nonzero exactly on `subset`
    subset: tuple[int, ...]
    kind: str  # KIND_ORIGINAL or KIND_COUPLED
    sobol_index: int | None  # sequence index of the weights, coupled rows only


@dataclass
class FeatureMap:
    """Immutable-by-convention bundle of all weight rows.

    Rows are ordered: the D original rows first, then N coupled rows per
    subset, subsets in lexicographic order.  Construction is deterministic
    given (dimension, order, neurons_per_term, sobol_skip).
    """

    dimension: int
    order: int
    neurons_per_term: int
    sobol_skip: int
    rows: list[FeatureRow]
    _matrix: np.ndarray | None = field(default=None, repr=False, compare=False)

    @property
    def n_features(self) -> int:
        return len(self.rows)

    def weight_matrix(self) -> np.ndarray:
        """Dense (F, D) weight matrix W; cached after first call."""
        if self._matrix is None:
            self._matrix = np.vstack([row.weights for row in self.rows])
        return self._matrix


def enumerate_subsets(dimension: int, order: int) -> list[tuple[int, ...]]:
    """All C(D, d) strictly-increasing index subsets, lexicographic order."""
    if not 1 <= order <= dimension:
        raise InvalidOrderError(
            f"coupling order must be in [1, {dimension}], got {order}"
        )
    return list(combinations(range(dimension), order))


def build_feature_map(
    dimension: int,
    order: int,
    neurons_per_term: int,
    sobol_skip: int = 0,
) -> FeatureMap:
    """Build the rule-based sparse weight matrix.

    Coupled rows consume consecutive points from a single shared
    `order`-dimensional Sobol stream across subsets, so no two rows repeat
    a weight pattern.  For order 1 no coupled rows are added and
    `neurons_per_term` is ignored.
    """
    subsets = enumerate_subsets(dimension, order)
    if neurons_per_term < 0:
        raise ValueError(f"neurons_per_term must be >= 0, got {neurons_per_term}")
    if sobol_skip < 0:
        raise ValueError(f"sobol_skip must be >= 0, got {sobol_skip}")

    rows = []
    for i in range(dimension):
        w = np.zeros(dimension)
        w[i] = 1.0
        rows.append(FeatureRow(weights=w, subset=(i,), kind=KIND_ORIGINAL, sobol_index=None))

    if order >= 2 and neurons_per_term > 0:
        stream = SobolStream(order, skip=sobol_skip)
        for subset in subsets:
            start = stream.cursor
            points = stream.take(neurons_per_term)
            for j in range(neurons_per_term):
                w = np.zeros(dimension)
                w[list(subset)] = points[j]
                rows.append(
                    FeatureRow(weights=w, subset=subset, kind=KIND_COUPLED, sobol_index=start + j)
                )

    fmap = FeatureMap(
        dimension=dimension,
        order=order,
        neurons_per_term=neurons_per_term,
        sobol_skip=sobol_skip,
        rows=rows,
    )
    expected = dimension if order == 1 else dimension + neurons_per_term * comb(dimension, order)
    assert fmap.n_features == expected
    return fmap


def map_features(fmap: FeatureMap, X: np.ndarray) -> np.ndarray:
    """Apply the weight matrix: Y[n, j] = dot(X[n], W[j]).

    Original rows copy their coordinate exactly; the result is linear in X.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise ShapeError(f"X must be 2-D, got shape {X.shape}")
    if X.shape[1] != fmap.dimension:
        raise ShapeError(
            f"X has {X.shape[1]} columns but the feature map expects {fmap.dimension}"
        )
    return X @ fmap.weight_matrix().T
