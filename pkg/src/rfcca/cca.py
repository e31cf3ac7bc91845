"""Regularized linear CCA, exact kernel CCA, and the randomized pipeline.

All solvers report canonical correlations only (no directions), sorted
descending, via symmetric reformulations: linear CCA takes singular values
of the whitened cross matrix, and KCCA takes eigenvalues of the symmetric
product of the two regularized kernel contractions. Data is used exactly as
given; no centering is applied here (the preprocessing pipeline handles
marginal transforms and regularization instead).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import NumericalError, ParameterError
from .features import FeatureMatrix
from .kernels import _kernel_values

__all__ = ["CcaResult", "linear_cca", "kcca", "rcca", "total_correlation_objective"]

# delta^2 eigenvalues slightly below zero are roundoff; anything worse is a bug.
_EIG_CLAMP = -1e-10
# Correlations may exceed 1 by at most this much before being clamped.
_CORR_SLACK = 1e-8


@dataclass(frozen=True)
class CcaResult:
    """Sorted canonical correlations with the summary metrics of interest."""

    correlations: np.ndarray
    mu: float

    @property
    def r(self) -> int:
        return self.correlations.shape[0]

    @property
    def total(self) -> float:
        return float(self.correlations.sum())

    @property
    def top10(self) -> float:
        return float(self.correlations[: min(10, self.r)].sum())

    @property
    def largest(self) -> float:
        return float(self.correlations[0]) if self.r else 0.0


def _finalize(correlations: np.ndarray, mu: float) -> CcaResult:
    if correlations.size and float(correlations.max()) > 1.0 + _CORR_SLACK:
        raise NumericalError(
            f"canonical correlation {correlations.max()} exceeds 1 beyond slack"
        )
    clamped = np.clip(correlations, 0.0, 1.0)
    return CcaResult(correlations=np.sort(clamped)[::-1], mu=float(mu))


def _inverse_sqrt_gram(gram: np.ndarray, mu: float, label: str) -> np.ndarray:
    """(gram + mu*I)^(-1/2); at mu = 0 a rank-deficient gram is an error."""
    gram = 0.5 * (gram + gram.T)
    eigs, vecs = scipy.linalg.eigh(gram)
    if mu == 0.0:
        floor = max(eigs[-1], 0.0) * 1e-12
        if eigs[0] <= floor or eigs[-1] <= 0.0:
            raise NumericalError(
                f"{label} Gram matrix is singular at mu=0 "
                f"(min eigenvalue {eigs[0]:.3e}); use mu > 0"
            )
    shifted = np.maximum(eigs + mu, 0.0)
    return (vecs / np.sqrt(shifted)[np.newaxis, :]) @ vecs.T


def linear_cca(A, Bm, mu: float) -> CcaResult:
    """Canonical correlations of two views under ridge regularization mu.

    Computed as singular values of (A.T A + mu I)^(-1/2) A.T B
    (B.T B + mu I)^(-1/2); reports r = min(p, q) values.
    """
    if mu < 0:
        raise ParameterError(f"mu must be nonnegative, got {mu}")
    A = np.asarray(A, dtype=float)
    Bm = np.asarray(Bm, dtype=float)
    if A.ndim != 2 or Bm.ndim != 2:
        raise ParameterError("views must be 2-d matrices")
    if A.shape[0] != Bm.shape[0]:
        raise ParameterError(
            f"views must share rows, got {A.shape[0]} and {Bm.shape[0]}"
        )
    left = _inverse_sqrt_gram(A.T @ A, mu, "first view")
    right = _inverse_sqrt_gram(Bm.T @ Bm, mu, "second view")
    C = left @ (A.T @ Bm) @ right
    singular_values = scipy.linalg.svd(C, compute_uv=False)
    return _finalize(singular_values, mu)


def _contraction_factors(K: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigenpairs of K with eigenvalues floored at zero."""
    eigs, vecs = scipy.linalg.eigh(K)
    return np.maximum(eigs, 0.0), vecs


def kcca(Kx, Ky, mu: float) -> CcaResult:
    """Exact kernel CCA: correlations from the regularized kernel contractions.

    delta_i^2 are the eigenvalues of Wx^(1/2) Wy Wx^(1/2) with
    W = K (K + mu*I)^-1, the symmetric form of the product eigenproblem; all
    r = n values are reported.
    """
    if mu <= 0:
        raise ParameterError(f"mu must be positive, got {mu}")
    Kx = _kernel_values(Kx)
    Ky = _kernel_values(Ky)
    if Kx.shape != Ky.shape:
        raise ParameterError(f"kernel shapes differ: {Kx.shape} vs {Ky.shape}")

    wx, vx = _contraction_factors(Kx)
    wy, vy = _contraction_factors(Ky)
    half_x = (vx * np.sqrt(wx / (wx + mu))[np.newaxis, :]) @ vx.T
    Wy = (vy * (wy / (wy + mu))[np.newaxis, :]) @ vy.T
    S = half_x @ Wy @ half_x
    S = 0.5 * (S + S.T)
    squared = scipy.linalg.eigh(S, eigvals_only=True)
    if float(squared.min()) < _EIG_CLAMP:
        raise NumericalError(
            f"squared correlation eigenvalue {squared.min():.3e} below clamp range"
        )
    return _finalize(np.sqrt(np.maximum(squared, 0.0)), mu)


def rcca(Zx: FeatureMatrix, Zy: FeatureMatrix, mu: float) -> CcaResult:
    """Randomized CCA: linear CCA of two feature transforms.

    Importance weights, when present, are folded into the columns first, so
    sampled selections enter with their reweighting.
    """
    return linear_cca(Zx.weighted_values(), Zy.weighted_values(), mu)


def total_correlation_objective(Kx, Ky, mu: float) -> float:
    """Sum of squared KCCA correlations, tr((Kx+muI)^-1 Ky (Ky+muI)^-1 Kx)."""
    if mu <= 0:
        raise ParameterError(f"mu must be positive, got {mu}")
    Kx = _kernel_values(Kx)
    Ky = _kernel_values(Ky)
    if Kx.shape != Ky.shape:
        raise ParameterError(f"kernel shapes differ: {Kx.shape} vs {Ky.shape}")
    eye = np.eye(Kx.shape[0])
    left = scipy.linalg.solve(Kx + mu * eye, Ky, assume_a="pos")
    right = scipy.linalg.solve(Ky + mu * eye, Kx, assume_a="pos")
    return float(np.einsum("ij,ji->", left, right))
