"""Random Fourier feature pools and transformed data matrices.

A pool is an oversampled bank of feature parameters (frequencies, phase
offsets) drawn from a Gaussian prior; selection routines reorder or resample
it before the transformed matrix is built. Transforms follow the Monte-Carlo
convention: column m of Z is phi(., w_m) scaled by 1/sqrt(M), so Z @ Z.T
estimates the prior-weighted kernel.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import ParameterError

__all__ = [
    "FeatureMapKind",
    "SamplerKind",
    "FeaturePool",
    "FeatureMatrix",
    "sample_pool",
    "feature_matrix",
    "reweighted_feature_matrix",
    "variance_correction",
    "estimate_kernel",
]

# Substream tags so adding offsets never perturbs the frequency draws.
_FREQUENCY_STREAM = 1
_OFFSET_STREAM = 2


class FeatureMapKind(Enum):
    """Feature map applied to each (data point, frequency) pair."""

    COSINE_WITH_OFFSET = "cosine_with_offset"  # cos(x.w + b), one column per feature
    COS_SIN_PAIR = "cos_sin_pair"  # (cos(x.w), sin(x.w)), two columns per feature

    @property
    def columns_per_feature(self) -> int:
        return 2 if self is FeatureMapKind.COS_SIN_PAIR else 1


class SamplerKind(Enum):
    """How frequencies are drawn from the N(0, sigma^2 I) prior."""

    IID_GAUSSIAN = "iid_gaussian"
    ORTHOGONAL = "orthogonal"


@dataclass(frozen=True)
class FeaturePool:
    """A bank of sampled feature parameters plus the prior that produced it.

    frequencies has one row per feature; offsets is empty for maps that do
    not use a phase. Instances are immutable; selection produces reordered
    copies via :meth:`take`.
    """

    frequencies: np.ndarray
    offsets: np.ndarray
    prior_sigma: float
    map_kind: FeatureMapKind
    sampler_kind: SamplerKind
    seed: int

    @property
    def size(self) -> int:
        return self.frequencies.shape[0]

    @property
    def dim(self) -> int:
        return self.frequencies.shape[1]

    def take(self, indices) -> "FeaturePool":
        """Pool restricted to (and reordered by) the given feature indices."""
        idx = np.asarray(indices, dtype=int)
        if idx.ndim != 1 or idx.size == 0:
            raise ParameterError("indices must be a nonempty 1-d sequence")
        if idx.min() < 0 or idx.max() >= self.size:
            raise ParameterError(
                f"indices out of range for pool of size {self.size}"
            )
        offsets = self.offsets[idx] if self.offsets.size else self.offsets
        return FeaturePool(
            frequencies=self.frequencies[idx],
            offsets=offsets,
            prior_sigma=self.prior_sigma,
            map_kind=self.map_kind,
            sampler_kind=self.sampler_kind,
            seed=self.seed,
        )


@dataclass(frozen=True)
class FeatureMatrix:
    """Transformed data matrix Z with optional importance weights.

    ``values`` stores the unweighted transform (1/sqrt(M)-scaled when
    ``scale_applied``); ``weights`` holds one sqrt(p/q) factor per feature
    and is applied lazily by :meth:`weighted_values`.
    """

    values: np.ndarray
    weights: np.ndarray | None = None
    scale_applied: bool = True
    map_kind: FeatureMapKind = FeatureMapKind.COSINE_WITH_OFFSET

    @property
    def n_rows(self) -> int:
        return self.values.shape[0]

    @property
    def n_columns(self) -> int:
        return self.values.shape[1]

    @property
    def n_features(self) -> int:
        return self.values.shape[1] // self.map_kind.columns_per_feature

    def weighted_values(self) -> np.ndarray:
        """values with the per-feature importance factors folded in."""
        if self.weights is None:
            return self.values
        per_column = np.repeat(self.weights, self.map_kind.columns_per_feature)
        return self.values * per_column[np.newaxis, :]


def sample_pool(
    d: int,
    M0: int,
    sigma: float,
    map_kind: FeatureMapKind = FeatureMapKind.COSINE_WITH_OFFSET,
    sampler_kind: SamplerKind = SamplerKind.IID_GAUSSIAN,
    seed: int = 0,
) -> FeaturePool:
    """Draw a pool of M0 feature parameters from the N(0, sigma^2 I_d) prior.

    IID_GAUSSIAN draws rows independently. ORTHOGONAL draws ceil(M0/d)
    square Gaussian blocks, orthonormalizes each by QR, rescales row j by an
    independent chi_d norm so marginals still match the Gaussian prior, and
    truncates excess rows of the last block. Phase offsets (uniform on
    [0, 2pi)) are generated only for maps that use them, from a substream
    independent of the frequency draws.
    """
    if d < 1 or M0 < 1:
        raise ParameterError(f"d and M0 must be >= 1, got d={d}, M0={M0}")
    if sigma <= 0:
        raise ParameterError(f"sigma must be positive, got {sigma}")

    freq_rng = np.random.default_rng(np.random.SeedSequence([seed, _FREQUENCY_STREAM]))
    if sampler_kind is SamplerKind.IID_GAUSSIAN:
        frequencies = sigma * freq_rng.standard_normal((M0, d))
    elif sampler_kind is SamplerKind.ORTHOGONAL:
        blocks = []
        for _ in range(-(-M0 // d)):
            gauss = freq_rng.standard_normal((d, d))
            q, r = np.linalg.qr(gauss)
            # Fix signs so q is Haar-distributed, not biased by the QR convention.
            q = q * np.where(np.diag(r) >= 0.0, 1.0, -1.0)[np.newaxis, :]
            norms = np.linalg.norm(freq_rng.standard_normal((d, d)), axis=1)
            blocks.append(sigma * norms[:, np.newaxis] * q)
        frequencies = np.vstack(blocks)[:M0]
    else:
        raise ParameterError(f"unknown sampler kind: {sampler_kind!r}")

    if map_kind.columns_per_feature == 1:
        offset_rng = np.random.default_rng(np.random.SeedSequence([seed, _OFFSET_STREAM]))
        offsets = offset_rng.uniform(0.0, 2.0 * np.pi, size=M0)
    else:
        offsets = np.empty(0)

    return FeaturePool(
        frequencies=frequencies,
        offsets=offsets,
        prior_sigma=float(sigma),
        map_kind=map_kind,
        sampler_kind=sampler_kind,
        seed=seed,
    )


def _raw_transform(X: np.ndarray, pool: FeaturePool, M: int) -> np.ndarray:
    """Unscaled phi(x_i, w_m) matrix for the first M pool features."""
    projection = X @ pool.frequencies[:M].T
    if pool.map_kind is FeatureMapKind.COSINE_WITH_OFFSET:
        return np.cos(projection + pool.offsets[:M][np.newaxis, :])
    out = np.empty((X.shape[0], 2 * M))
    out[:, 0::2] = np.cos(projection)
    out[:, 1::2] = np.sin(projection)
    return out


def _check_data(X, pool: FeaturePool) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise ParameterError(f"X must be 2-d, got shape {X.shape}")
    if X.shape[1] != pool.dim:
        raise ParameterError(
            f"X has {X.shape[1]} columns but pool dimension is {pool.dim}"
        )
    return X


def feature_matrix(X, pool: FeaturePool, M: int) -> FeatureMatrix:
    """Transformed matrix Z from the first M pool features, scaled by 1/sqrt(M).

    Selection routines reorder the pool (``pool.take``) before calling, so
    "first M" realizes any chosen subset. With a pair map each feature
    contributes two adjacent columns, both scaled by 1/sqrt(M).
    """
    X = _check_data(X, pool)
    if not 1 <= M <= pool.size:
        raise ParameterError(f"M must be in [1, {pool.size}], got {M}")
    values = _raw_transform(X, pool, M) / np.sqrt(M)
    return FeatureMatrix(values=values, map_kind=pool.map_kind)


def reweighted_feature_matrix(X, pool: FeaturePool, indices, weight_ratios) -> FeatureMatrix:
    """Importance-reweighted transform over sampled pool positions.

    Each selected feature's column is sqrt(p/q) times the plain 1/sqrt(M)
    column, which keeps Z~ @ Z~.T an unbiased estimate of the prior kernel
    when features were sampled proportionally to q. Duplicate indices are
    legitimate (sampling is with replacement).
    """
    ratios = np.asarray(weight_ratios, dtype=float)
    idx = np.asarray(indices, dtype=int)
    if ratios.shape != idx.shape:
        raise ParameterError("indices and weight_ratios must have equal length")
    if ratios.size == 0:
        raise ParameterError("at least one feature must be selected")
    if np.any(ratios <= 0.0):
        raise ParameterError("weight ratios must be strictly positive")
    subset = pool.take(idx)
    plain = feature_matrix(X, subset, M=idx.size)
    return FeatureMatrix(
        values=plain.values,
        weights=np.sqrt(ratios),
        scale_applied=True,
        map_kind=pool.map_kind,
    )


def variance_correction(map_kind: FeatureMapKind) -> float:
    """Column factor making E[Z Z.T] equal the Gaussian kernel exactly.

    The offset-cosine map integrates to half the kernel, so its columns need
    sqrt(2); the cos/sin pair map is already unbiased. This is a diagnostic
    convention only: pipelines compare algorithms on the literal transforms.
    """
    return np.sqrt(2.0) if map_kind is FeatureMapKind.COSINE_WITH_OFFSET else 1.0


def estimate_kernel(Z: FeatureMatrix) -> np.ndarray:
    """Kernel-matrix estimate implied by Z, with the variance correction applied."""
    W = Z.weighted_values() * variance_correction(Z.map_kind)
    K = W @ W.T
    return np.triu(K) + np.triu(K, 1).T
