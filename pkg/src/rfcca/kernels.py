"""Exact Gaussian kernels, effective dimension, and spectral-approximation checks.

The diagnostics quantify how well a feature transform's Gram matrix
sandwiches the exact kernel: Z Z.T + lam*I must sit between
(1 +/- delta)(K + lam*I) in the Loewner order. The bound calculators return
the feature counts sufficient for that guarantee at a requested confidence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import ParameterError
from .features import FeatureMatrix

__all__ = [
    "KernelMatrix",
    "SpectralReport",
    "gaussian_kernel",
    "kernel_from_features",
    "linear_kernel",
    "effective_dimension",
    "spectral_check",
    "required_features",
    "rff_required_features",
]


@dataclass(frozen=True)
class KernelMatrix:
    """A symmetric n x n kernel matrix tagged with how it was built."""

    values: np.ndarray
    kind: str  # "gaussian" | "from_features" | "linear"
    sigma: float | None = None

    @property
    def n(self) -> int:
        return self.values.shape[0]


def _symmetrize(K: np.ndarray) -> np.ndarray:
    return np.triu(K) + np.triu(K, 1).T


def _kernel_values(K) -> np.ndarray:
    """Accept KernelMatrix or ndarray; enforce the symmetry contract."""
    values = K.values if isinstance(K, KernelMatrix) else np.asarray(K, dtype=float)
    if values.ndim != 2 or values.shape[0] != values.shape[1]:
        raise ParameterError(f"kernel matrix must be square, got shape {values.shape}")
    scale = max(1.0, float(np.max(np.abs(values))) if values.size else 1.0)
    if float(np.max(np.abs(values - values.T))) > 1e-12 * scale:
        raise ParameterError("kernel matrix is not symmetric within 1e-12 relative")
    return values


def gaussian_kernel(X, sigma: float) -> KernelMatrix:
    """Exact Gaussian kernel exp(-sigma^2 ||x - x'||^2 / 2).

    sigma is the scale of the Fourier frequency prior N(0, sigma^2 I), i.e.
    an inverse bandwidth. Symmetry is exact by construction (upper triangle
    mirrored) and the diagonal is exactly one.
    """
    if sigma <= 0:
        raise ParameterError(f"sigma must be positive, got {sigma}")
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise ParameterError(f"X must be 2-d, got shape {X.shape}")
    sq_norms = np.einsum("ij,ij->i", X, X)
    sq_dists = sq_norms[:, None] + sq_norms[None, :] - 2.0 * (X @ X.T)
    np.clip(sq_dists, 0.0, None, out=sq_dists)
    K = np.exp(-0.5 * sigma**2 * sq_dists)
    K = _symmetrize(K)
    np.fill_diagonal(K, 1.0)
    return KernelMatrix(values=K, kind="gaussian", sigma=float(sigma))


def kernel_from_features(Z) -> KernelMatrix:
    """Gram matrix Z Z.T of a (possibly reweighted) feature transform."""
    W = Z.weighted_values() if isinstance(Z, FeatureMatrix) else np.asarray(Z, dtype=float)
    return KernelMatrix(values=_symmetrize(W @ W.T), kind="from_features")


def linear_kernel(Y) -> KernelMatrix:
    """Linear kernel Y Y.T (a vector y gives the rank-one y y.T)."""
    Y = np.asarray(Y, dtype=float)
    if Y.ndim == 1:
        Y = Y[:, None]
    return KernelMatrix(values=_symmetrize(Y @ Y.T), kind="linear")


def effective_dimension(K, lam: float) -> float:
    """Effective dimension tr(K (K + lam*I)^-1) via eigendecomposition.

    Eigenvalues are floored at zero so PSD-up-to-roundoff inputs cannot
    produce a negative result.
    """
    if lam <= 0:
        raise ParameterError(f"lambda must be positive, got {lam}")
    values = _kernel_values(K)
    eigs = np.maximum(scipy.linalg.eigh(values, eigvals_only=True), 0.0)
    return float(np.sum(eigs / (eigs + lam)))


@dataclass(frozen=True)
class SpectralReport:
    """Outcome of a spectral-approximation check at one regularization level.

    delta_achieved is the smallest delta for which both Loewner inequalities
    hold; it is reported even when outside the (0, 1/2] range where the
    sample-count bounds apply.
    """

    delta_achieved: float
    lam: float
    eig_min: float
    eig_max: float
    holds_at: dict[float, bool]

    def as_record(self) -> dict[str, str]:
        """Flat key=value view for text reporting."""
        record = {
            "delta_achieved": repr(self.delta_achieved),
            "lambda": repr(self.lam),
            "eig_min": repr(self.eig_min),
            "eig_max": repr(self.eig_max),
        }
        for delta, ok in self.holds_at.items():
            record[f"holds_at_{delta:g}"] = str(ok).lower()
        return record


def spectral_check(K, Z, lam: float, deltas=()) -> SpectralReport:
    """Smallest delta for which Z Z.T + lam*I spectrally approximates K + lam*I.

    Whitens the Gram matrix by (K + lam*I)^(-1/2) on both sides and reads the
    answer off the extreme eigenvalues of the result. The whitening floors
    eigenvalues of K + lam*I at lam*1e-12 to guard roundoff negatives.
    """
    if lam <= 0:
        raise ParameterError(f"lambda must be positive, got {lam}")
    values = _kernel_values(K)
    W = Z.weighted_values() if isinstance(Z, FeatureMatrix) else np.asarray(Z, dtype=float)
    if W.shape[0] != values.shape[0]:
        raise ParameterError(
            f"Z has {W.shape[0]} rows but the kernel is {values.shape[0]} x {values.shape[0]}"
        )

    shifted = values + lam * np.eye(values.shape[0])
    eigs, vecs = scipy.linalg.eigh(shifted)
    eigs = np.maximum(eigs, lam * 1e-12)
    inv_sqrt = (vecs / np.sqrt(eigs)[np.newaxis, :]) @ vecs.T

    gram_shifted = W @ W.T + lam * np.eye(values.shape[0])
    E = inv_sqrt @ gram_shifted @ inv_sqrt
    E = 0.5 * (E + E.T)
    spectrum = scipy.linalg.eigh(E, eigvals_only=True)
    eig_min, eig_max = float(spectrum[0]), float(spectrum[-1])
    delta_achieved = max(1.0 - eig_min, eig_max - 1.0, 0.0)
    return SpectralReport(
        delta_achieved=delta_achieved,
        lam=float(lam),
        eig_min=eig_min,
        eig_max=eig_max,
        holds_at={float(d): delta_achieved <= d for d in deltas},
    )


def _check_bound_args(delta: float, rho: float) -> None:
    if not 0.0 < delta <= 0.5:
        raise ParameterError(f"delta must be in (0, 1/2], got {delta}")
    if not 0.0 < rho < 1.0:
        raise ParameterError(f"rho must be in (0, 1), got {rho}")


def required_features(
    trace_KB: float, S_lambda: float, delta: float, delta0: float, rho: float
) -> int:
    """Features sufficient for a delta-spectral approximation under score sampling.

    Evaluates ceil(8 tr(KB) / (3 delta^2 (1 - delta0)) * ln(16 S_lambda / rho)).
    With tr(KB) = S_lambda and delta0 = 0 this reduces to the leverage-score
    bound. The center matrix must dominate (1 - delta0)(K + lam*I)^-1 for the
    guarantee to apply; that hypothesis is the caller's to ensure.
    """
    _check_bound_args(delta, rho)
    if not 0.0 <= delta0 < 1.0:
        raise ParameterError(f"delta0 must be in [0, 1), got {delta0}")
    if trace_KB <= 0 or S_lambda <= 0:
        raise ParameterError("trace_KB and S_lambda must be positive")
    count = (8.0 * trace_KB) / (3.0 * delta**2 * (1.0 - delta0)) * math.log(
        16.0 * S_lambda / rho
    )
    return math.ceil(count)


def rff_required_features(
    n: int, lam: float, S_lambda: float, delta: float, rho: float
) -> int:
    """Plain-sampling feature count ceil((8/3) delta^-2 (n/lam) ln(16 S_lambda/rho)).

    Assumes ||K||_2 >= lam; that cannot be verified from these scalars, so it
    is the caller's responsibility.
    """
    _check_bound_args(delta, rho)
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n}")
    if lam <= 0 or S_lambda <= 0:
        raise ParameterError("lambda and S_lambda must be positive")
    count = (8.0 / 3.0) / delta**2 * (n / lam) * math.log(16.0 * S_lambda / rho)
    return math.ceil(count)
