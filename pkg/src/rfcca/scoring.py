"""Data-dependent scoring and selection of pooled random features.

Every rule assigns one real score per pool feature; selection either keeps
the top M deterministically (the correlation-maximizing rules) or samples M
proportionally with importance reweighting (leverage scores). Quadratic-form
scores are computed on the stored 1/sqrt(M0)-scaled columns; that differs
from the unscaled definition by the constant 1/M0, which changes no ranking
and keeps the feature/kernel dual forms exactly equal.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
import scipy.linalg

from .errors import ParameterError
from .features import FeatureMatrix

__all__ = [
    "ScoreRule",
    "ScoreVector",
    "Selection",
    "SelectionMode",
    "score_general",
    "ls_scores",
    "eerf_scores",
    "orcca1_scores",
    "orcca2_scores",
    "select_top_m",
    "sample_proportional",
]


@dataclass(frozen=True)
class ScoreRule:
    """Which rule produced a score vector, with its regularization if any."""

    kind: str  # "general" | "leverage" | "eerf" | "orcca1" | "orcca2_x" | "orcca2_y"
    param: float | None = None


@dataclass(frozen=True)
class ScoreVector:
    """Per-feature scores; correlation-objective scores may be negative."""

    scores: np.ndarray
    rule: ScoreRule
    normalized: bool = False

    def __len__(self) -> int:
        return self.scores.shape[0]


class SelectionMode(Enum):
    TOP_M = "top_m"
    SAMPLED_PROPORTIONAL = "sampled_proportional"


@dataclass(frozen=True)
class Selection:
    """Chosen pool positions, with importance ratios when sampled."""

    indices: np.ndarray
    weight_ratios: np.ndarray | None
    mode: SelectionMode


def _unweighted_columns(Z: FeatureMatrix) -> np.ndarray:
    if Z.weights is not None:
        raise ParameterError("scoring requires an unweighted feature matrix")
    return Z.values


def score_general(Z: FeatureMatrix, B) -> ScoreVector:
    """General quadratic-form score: per column z, the value z.T B z.

    The prior density factor is implicit because pool features are prior
    draws. B may be non-symmetric (the correlation-objective centers are),
    so scores may be negative.
    """
    V = _unweighted_columns(Z)
    B = np.asarray(B, dtype=float)
    if B.shape != (V.shape[0], V.shape[0]):
        raise ParameterError(
            f"B must be {V.shape[0]} x {V.shape[0]}, got shape {B.shape}"
        )
    scores = np.einsum("im,im->m", V, B @ V)
    return ScoreVector(scores=scores, rule=ScoreRule("general"))


def ls_scores(Z: FeatureMatrix, lam: float) -> ScoreVector:
    """Ridge leverage scores diag((Z.T Z + lam*I)^-1 Z.T Z), each in [0, 1).

    This is the practical form of leverage-score sampling: the kernel matrix
    is replaced by the pool's own Gram estimate, turning an n x n inversion
    into an M0 x M0 solve.
    """
    if lam <= 0:
        raise ParameterError(f"lambda must be positive, got {lam}")
    V = _unweighted_columns(Z)
    gram = V.T @ V
    gram = 0.5 * (gram + gram.T)
    shifted = gram + lam * np.eye(gram.shape[0])
    scores = np.einsum("ii->i", scipy.linalg.solve(shifted, gram, assume_a="pos"))
    return ScoreVector(
        scores=np.maximum(scores, 0.0), rule=ScoreRule("leverage", float(lam))
    )


def eerf_scores(Z: FeatureMatrix, y) -> ScoreVector:
    """Energy rule |mean_i y_i phi(x_i, w)| per feature, on unscaled values."""
    V = _unweighted_columns(Z)
    y = np.asarray(y, dtype=float).reshape(-1)
    if y.shape[0] != V.shape[0]:
        raise ParameterError(
            f"y has length {y.shape[0]} but Z has {V.shape[0]} rows"
        )
    unscale = np.sqrt(Z.n_features) if Z.scale_applied else 1.0
    scores = np.abs(V.T @ y) * unscale / V.shape[0]
    return ScoreVector(scores=scores, rule=ScoreRule("eerf"))


def orcca1_scores(Zx: FeatureMatrix, y, mu: float) -> ScoreVector:
    """Correlation-objective scores for a nonlinear X view against a linear y.

    diag((Zx.T Zx + mu*I)^-1 Zx.T y y.T Zx), evaluated as an elementwise
    product of one linear solve with Zx.T y. Cost O(n M0^2 + M0^3).
    """
    if mu <= 0:
        raise ParameterError(f"mu must be positive, got {mu}")
    V = _unweighted_columns(Zx)
    y = np.asarray(y, dtype=float).reshape(-1)
    if y.shape[0] != V.shape[0]:
        raise ParameterError(
            f"y has length {y.shape[0]} but Zx has {V.shape[0]} rows"
        )
    c = V.T @ y
    gram = V.T @ V
    gram = 0.5 * (gram + gram.T)
    solved = scipy.linalg.solve(gram + mu * np.eye(gram.shape[0]), c, assume_a="pos")
    return ScoreVector(scores=solved * c, rule=ScoreRule("orcca1", float(mu)))


def orcca2_scores(
    Zx: FeatureMatrix, Zy: FeatureMatrix, mu: float
) -> tuple[ScoreVector, ScoreVector]:
    """Correlation-objective scores when both views are feature-mapped.

    Builds Q = (Zx.T Zx + mu*I)^-1 Zx.T Zy and P = (Zy.T Zy + mu*I)^-1 Zy.T Zx
    and returns (diag(QP), diag(PQ)) for the X and Y pools respectively.
    """
    if mu <= 0:
        raise ParameterError(f"mu must be positive, got {mu}")
    Vx = _unweighted_columns(Zx)
    Vy = _unweighted_columns(Zy)
    if Vx.shape[0] != Vy.shape[0]:
        raise ParameterError(
            f"row mismatch: Zx has {Vx.shape[0]} rows, Zy has {Vy.shape[0]}"
        )
    cross = Vx.T @ Vy
    gram_x = Vx.T @ Vx
    gram_y = Vy.T @ Vy
    Q = scipy.linalg.solve(
        0.5 * (gram_x + gram_x.T) + mu * np.eye(gram_x.shape[0]), cross, assume_a="pos"
    )
    P = scipy.linalg.solve(
        0.5 * (gram_y + gram_y.T) + mu * np.eye(gram_y.shape[0]), cross.T, assume_a="pos"
    )
    qx = np.einsum("ij,ji->i", Q, P)
    qy = np.einsum("ij,ji->i", P, Q)
    return (
        ScoreVector(scores=qx, rule=ScoreRule("orcca2_x", float(mu))),
        ScoreVector(scores=qy, rule=ScoreRule("orcca2_y", float(mu))),
    )


def select_top_m(scores: ScoreVector, M: int) -> Selection:
    """Indices of the M largest scores; ties broken by smaller pool index.

    Selecting the whole pool is the identity: indices stay in pool order.
    """
    values = scores.scores
    if not 1 <= M <= values.shape[0]:
        raise ParameterError(f"M must be in [1, {values.shape[0]}], got {M}")
    if M == values.shape[0]:
        indices = np.arange(M)
    else:
        indices = np.argsort(-values, kind="stable")[:M]
    return Selection(indices=indices, weight_ratios=None, mode=SelectionMode.TOP_M)


def sample_proportional(scores: ScoreVector, M: int, seed: int) -> Selection:
    """Sample M pool positions i.i.d. proportional to the scores, with replacement.

    The returned ratios are p_hat/q_hat per draw, with the uniform pool prior
    p_hat = 1/M0; duplicates are kept (correct for the importance-sampling
    estimator).
    """
    values = scores.scores
    if M < 1:
        raise ParameterError(f"M must be >= 1, got {M}")
    if np.any(values < 0.0):
        raise ParameterError("sampling requires nonnegative scores")
    total = float(values.sum())
    if total <= 0.0:
        raise ParameterError("sampling requires at least one positive score")
    q_hat = values / total
    rng = np.random.default_rng(seed)
    indices = rng.choice(values.shape[0], size=M, replace=True, p=q_hat)
    ratios = (1.0 / values.shape[0]) / q_hat[indices]
    return Selection(
        indices=indices, weight_ratios=ratios, mode=SelectionMode.SAMPLED_PROPORTIONAL
    )
