"""First-order additive Gaussian process regression.

The kernel is a plain sum of one-dimensional squared-exponential kernels,
one per feature, all sharing a single length scale.  Because the kernel is
additive, the posterior mean is an additive function of the features: each
feature j owns a one-dimensional component function

    f_j(u) = sum_m alpha[m] * exp(-(u - Ytrain[m, j])^2 / (2 l^2))

and the full mean is f0 + sum_j f_j(y_j).  Those component functions are
the per-neuron activation functions of the network assembled in
:mod:`hdmrnet.model`.

Training is a Cholesky solve of (K + noise * I) alpha = t - mean(t); no
hyperparameter is optimized.  All arithmetic is float64.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from .errors import IllConditionedGramError, InvalidHyperparameterError, ShapeError

# Jitter escalation ceiling; fits needing more than this are refused.
MAX_JITTER = 1e-2

# Feature chunk for pairwise kernel accumulation (bounds peak memory at
# roughly n_rows * n_cols * _FEATURE_CHUNK doubles).
_FEATURE_CHUNK = 8
_ROW_CHUNK = 256


@dataclass
class AdditiveGprModel:
    """Fitted additive-kernel GPR in dual (kernel-expansion) form.

    `alpha` solves (K + effective_noise * I) alpha = t - target_offset,
    where K is the additive Gram matrix over `Ytrain`.  `effective_noise`
    equals `noise` unless jitter escalation was required.
    """

    Ytrain: np.ndarray  # (M, F) training features
    alpha: np.ndarray  # (M,) dual coefficients
    length_scale: float
    noise: float  # requested diagonal noise
    effective_noise: float  # noise actually used after escalation
    target_offset: float  # training-target mean, added back at prediction

    @property
    def n_train(self) -> int:
        return self.Ytrain.shape[0]

    @property
    def n_features(self) -> int:
        return self.Ytrain.shape[1]

    @property
    def jitter_escalated(self) -> bool:
        return self.effective_noise != self.noise


def _check_length_scale(length_scale: float) -> float:
    length_scale = float(length_scale)
    if not length_scale > 0.0:
        raise InvalidHyperparameterError(f"length scale must be > 0, got {length_scale}")
    return length_scale


def kernel_1d(a, b, length_scale: float):
    """One-dimensional squared-exponential kernel exp(-(a-b)^2 / (2 l^2)).

    Accepts scalars or broadcastable arrays; symmetric, values in (0, 1].
    """
    length_scale = _check_length_scale(length_scale)
    d = np.subtract(a, b)
    return np.exp(-(d * d) / (2.0 * length_scale**2))


def kernel_additive(ya: np.ndarray, yb: np.ndarray, length_scale: float) -> float:
    """Additive kernel: sum over features of the one-dimensional kernels."""
    ya = np.asarray(ya, dtype=np.float64)
    yb = np.asarray(yb, dtype=np.float64)
    if ya.shape != yb.shape or ya.ndim != 1:
        raise ShapeError(f"feature vectors must be equal-length 1-D, got {ya.shape} and {yb.shape}")
    return float(np.sum(kernel_1d(ya, yb, length_scale)))


def _pairwise_additive(Ya: np.ndarray, Yb: np.ndarray, length_scale: float) -> np.ndarray:
    """(n, m) matrix of additive-kernel values between the rows of Ya and Yb.

    Accumulates over feature chunks in fixed order, so the result is
    independent of any caller-side parallelism and bit-symmetric when
    Ya is Yb.
    """
    inv = 1.0 / (2.0 * length_scale**2)
    n, n_feat = Ya.shape
    m = Yb.shape[0]
    K = np.zeros((n, m))
    for f0 in range(0, n_feat, _FEATURE_CHUNK):
        a = Ya[:, f0 : f0 + _FEATURE_CHUNK]
        b = Yb[:, f0 : f0 + _FEATURE_CHUNK]
        d = a[:, None, :] - b[None, :, :]
        np.multiply(d, d, out=d)
        np.multiply(d, -inv, out=d)
        np.exp(d, out=d)
        K += d.sum(axis=2)
    return K


def gram_matrix(Y: np.ndarray, length_scale: float) -> np.ndarray:
    """Symmetric (M, M) Gram matrix of the additive kernel.

    Diagonal entries equal the feature count.  Symmetry holds to exact bit
    equality because (a-b)^2 and (b-a)^2 are identical in floating point.
    """
    length_scale = _check_length_scale(length_scale)
    Y = np.asarray(Y, dtype=np.float64)
    if Y.ndim != 2 or Y.shape[0] < 1:
        raise ShapeError(f"Y must be a non-empty 2-D matrix, got shape {Y.shape}")
    return _pairwise_additive(Y, Y, length_scale)


def gpr_fit(
    Y: np.ndarray,
    t: np.ndarray,
    length_scale: float,
    noise: float = 1e-6,
) -> AdditiveGprModel:
    """Fit the additive GPR by a Cholesky solve with jitter escalation.

    The target mean is subtracted before the solve and stored as the
    offset.  If factorization fails, or the solve residual exceeds
    1e-8 * ||t - mean||, the diagonal noise is escalated by factors of 10
    up to `MAX_JITTER`; beyond that an error reports the final jitter.
    """
    length_scale = _check_length_scale(length_scale)
    noise = float(noise)
    if not noise > 0.0:
        raise InvalidHyperparameterError(f"noise must be > 0, got {noise}")
    Y = np.asarray(Y, dtype=np.float64)
    t = np.asarray(t, dtype=np.float64).ravel()
    if Y.ndim != 2 or Y.shape[0] < 1:
        raise ShapeError(f"Y must be a non-empty 2-D matrix, got shape {Y.shape}")
    if t.shape[0] != Y.shape[0]:
        raise ShapeError(f"{t.shape[0]} targets for {Y.shape[0]} feature rows")

    offset = float(np.mean(t))
    b = t - offset
    b_norm = float(np.linalg.norm(b))

    if b_norm == 0.0:
        return AdditiveGprModel(
            Ytrain=Y.copy(),
            alpha=np.zeros(Y.shape[0]),
            length_scale=length_scale,
            noise=noise,
            effective_noise=noise,
            target_offset=offset,
        )

    K = gram_matrix(Y, length_scale)
    sigma = noise
    while True:
        A = K + sigma * np.eye(K.shape[0])
        try:
            factor = cho_factor(A, lower=True)
        except LinAlgError:
            alpha = None
        else:
            alpha = cho_solve(factor, b)
            # One round of iterative refinement tightens the residual when
            # the matrix is barely positive definite.
            for _ in range(2):
                resid = b - A @ alpha
                if np.linalg.norm(resid) <= 1e-9 * b_norm:
                    break
                alpha = alpha + cho_solve(factor, resid)
            if np.linalg.norm(b - A @ alpha) > 1e-8 * b_norm:
                alpha = None
        if alpha is not None:
            return AdditiveGprModel(
                Ytrain=Y.copy(),
                alpha=alpha,
                length_scale=length_scale,
                noise=noise,
                effective_noise=sigma,
                target_offset=offset,
            )
        if sigma * 10.0 > MAX_JITTER * (1.0 + 1e-12):
            raise IllConditionedGramError(
                f"Gram matrix not positive definite even at jitter {sigma:g} "
                f"(requested noise {noise:g})",
                final_jitter=sigma,
            )
        sigma *= 10.0


def gpr_predict(model: AdditiveGprModel, Ystar: np.ndarray) -> np.ndarray:
    """Posterior mean at each row of Ystar.

    Computed literally as the network forward pass: the offset plus the
    per-feature component functions summed in feature order.  Keeping the
    same accumulation structure as `gpr_component` makes the decomposition
    identity hold to rounding of the component values themselves, even for
    ill-conditioned fits with huge dual coefficients.
    """
    Ystar = np.asarray(Ystar, dtype=np.float64)
    if Ystar.ndim != 2 or Ystar.shape[1] != model.n_features:
        raise ShapeError(
            f"Ystar must be (n, {model.n_features}), got shape {Ystar.shape}"
        )
    out = np.empty(Ystar.shape[0])
    for r0 in range(0, Ystar.shape[0], _ROW_CHUNK):
        block = Ystar[r0 : r0 + _ROW_CHUNK]
        acc = np.full(block.shape[0], model.target_offset)
        for j in range(model.n_features):
            acc += gpr_component(model, j, block[:, j])
        out[r0 : r0 + _ROW_CHUNK] = acc
    return out


def gpr_component(model: AdditiveGprModel, feature_index: int, u) -> np.ndarray:
    """Component function f_j evaluated on the grid `u`.

    f_j(u) = sum_m alpha[m] * k1(u, Ytrain[m, j]); summing components over
    all features and adding the offset reproduces `gpr_predict` exactly up
    to summation order.
    """
    if not 0 <= feature_index < model.n_features:
        raise IndexError(
            f"feature index {feature_index} out of range [0, {model.n_features})"
        )
    u = np.atleast_1d(np.asarray(u, dtype=np.float64))
    inv = 1.0 / (2.0 * model.length_scale**2)
    d = u[:, None] - model.Ytrain[None, :, feature_index]
    np.multiply(d, d, out=d)
    np.multiply(d, -inv, out=d)
    np.exp(d, out=d)
    return d @ model.alpha
