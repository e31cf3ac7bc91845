"""Benchmark harness: configuration, seeding, per-algorithm pipelines, metrics.

Each benchmark row runs one (algorithm, feature count, repetition) cell:
preprocess once per dataset, build per-view pools of size pool_factor * M,
select features per the algorithm, solve the regularized CCA, and emit the
three correlation metrics with wall-clock timings. Seeds are derived by
hashing (master_seed, algorithm, M, repetition), so adding an algorithm or a
grid point never shifts any other cell's draws.
"""

from __future__ import annotations

import hashlib
import time
from dataclasses import dataclass, field

import numpy as np

from .cca import CcaResult, kcca, linear_cca, rcca
from .data import (
    Dataset,
    bandwidth_heuristic,
    copula_transform,
    load_csv,
    split,
    synthetic_views,
)
from .errors import ConfigError, DataError
from .features import (
    FeatureMapKind,
    FeatureMatrix,
    SamplerKind,
    feature_matrix,
    reweighted_feature_matrix,
    sample_pool,
    variance_correction,
)
from .kernels import (
    effective_dimension,
    gaussian_kernel,
    required_features,
    rff_required_features,
    spectral_check,
)
from .scoring import (
    ScoreVector,
    Selection,
    eerf_scores,
    ls_scores,
    orcca1_scores,
    orcca2_scores,
    sample_proportional,
    score_general,
    select_top_m,
)

__all__ = [
    "CsvSource",
    "SyntheticSource",
    "ExperimentConfig",
    "MetricsRow",
    "SpectralRunResult",
    "CSV_HEADER",
    "KNOWN_ALGORITHMS",
    "derive_seed",
    "run_benchmark",
    "run_kcca_baseline",
    "run_spectral_check",
    "run_select",
    "write_metrics_csv",
]

KNOWN_ALGORITHMS = ("RFF", "ORF", "LS", "EERF", "ORCCA1", "ORCCA2", "KCCA")
CSV_HEADER = (
    "algorithm,M,repetition,seed,total_cc,top10_cc,largest_cc,"
    "select_time_ms,cca_time_ms"
)
# Leverage-score regularizer candidates, scaled by the training row count.
LS_LAMBDA_GRID = (0.01, 0.1, 1.0, 10.0)


@dataclass(frozen=True)
class CsvSource:
    path: str
    x_columns: tuple
    y_columns: tuple
    has_header: bool = True
    delimiter: str = ","


@dataclass(frozen=True)
class SyntheticSource:
    n: int = 400
    latent_dim: int = 3
    d_x: int = 8
    d_y: int = 4
    noise: float = 0.3
    seed: int = 0


@dataclass
class ExperimentConfig:
    """Everything a benchmark run depends on; validated before running."""

    source: CsvSource | SyntheticSource = field(default_factory=SyntheticSource)
    algorithms: tuple[str, ...] = ("RFF", "ORCCA2")
    M_grid: tuple[int, ...] = (20, 50, 100)
    pool_factor: int = 10
    mu: float = 1e-6
    lambda_ls: float | None = None  # None -> held-out grid search
    sigma_mode: str = "heuristic"  # "heuristic" | "fixed"
    sigma_k: int = 50
    sigma_value: float | None = None
    sigma_y_mode: str = "same"  # "same" | "fixed"
    sigma_y_value: float | None = None
    repetitions: int = 30
    master_seed: int = 0
    split: float | None = None
    transform_y: bool = True
    kcca_max_n: int = 2000
    metrics: tuple[str, ...] = ("total", "top10", "largest")

    def validate(self) -> None:
        for name in self.algorithms:
            if name not in KNOWN_ALGORITHMS:
                raise ConfigError(
                    f"unknown algorithm {name!r}; choose from {KNOWN_ALGORITHMS}"
                )
        if not self.algorithms:
            raise ConfigError("at least one algorithm is required")
        if not self.M_grid or any(m < 1 for m in self.M_grid):
            raise ConfigError(f"M_grid must be positive counts, got {self.M_grid}")
        if self.pool_factor < 1:
            raise ConfigError(
                f"pool_factor must be >= 1 so the pool covers M, got {self.pool_factor}"
            )
        if self.mu < 0:
            raise ConfigError(f"mu must be nonnegative, got {self.mu}")
        if self.lambda_ls is not None and self.lambda_ls <= 0:
            raise ConfigError(f"lambda_ls must be positive, got {self.lambda_ls}")
        if self.sigma_mode not in ("heuristic", "fixed"):
            raise ConfigError(f"sigma_mode must be heuristic|fixed, got {self.sigma_mode}")
        if self.sigma_mode == "fixed" and (self.sigma_value is None or self.sigma_value <= 0):
            raise ConfigError("fixed sigma_mode needs a positive sigma_value")
        if self.sigma_mode == "heuristic" and self.sigma_k < 1:
            raise ConfigError(f"sigma_k must be >= 1, got {self.sigma_k}")
        if self.sigma_y_mode not in ("same", "fixed"):
            raise ConfigError(f"sigma_y_mode must be same|fixed, got {self.sigma_y_mode}")
        if self.sigma_y_mode == "fixed" and (
            self.sigma_y_value is None or self.sigma_y_value <= 0
        ):
            raise ConfigError("fixed sigma_y_mode needs a positive sigma_y_value")
        if self.repetitions < 1:
            raise ConfigError(f"repetitions must be >= 1, got {self.repetitions}")
        if self.split is not None and not 0.0 < self.split < 1.0:
            raise ConfigError(f"split must be in (0, 1), got {self.split}")
        if self.kcca_max_n < 2:
            raise ConfigError(f"kcca_max_n must be >= 2, got {self.kcca_max_n}")
        for metric in self.metrics:
            if metric not in ("total", "top10", "largest"):
                raise ConfigError(f"unknown metric {metric!r}")


@dataclass(frozen=True)
class MetricsRow:
    algorithm: str
    M: int
    repetition: int
    seed: int
    total_cc: float
    top10_cc: float
    largest_cc: float
    select_time_ms: float
    cca_time_ms: float

    def csv_cells(self, no_timing: bool = False) -> list[str]:
        cells = [
            self.algorithm,
            str(self.M),
            str(self.repetition),
            str(self.seed),
            repr(self.total_cc),
            repr(self.top10_cc),
            repr(self.largest_cc),
        ]
        if no_timing:
            cells += ["", ""]
        else:
            cells += [f"{self.select_time_ms:.3f}", f"{self.cca_time_ms:.3f}"]
        return cells


def derive_seed(master_seed: int, algorithm: str, M: int, repetition: int) -> int:
    """Stable 64-bit seed for one benchmark cell."""
    digest = hashlib.sha256(
        f"{master_seed}|{algorithm}|{M}|{repetition}".encode()
    ).digest()
    return int.from_bytes(digest[:8], "big")


def _purpose_seed(base_seed: int, purpose: str) -> int:
    digest = hashlib.sha256(f"{base_seed}|{purpose}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


@dataclass(frozen=True)
class _Prepared:
    """Dataset after the preprocessing recipe, with fit/eval row views."""

    X_fit: np.ndarray
    Y_fit: np.ndarray
    X_eval: np.ndarray
    Y_eval: np.ndarray
    sigma_x: float
    sigma_y: float

    @property
    def d_x(self) -> int:
        return self.X_fit.shape[1]

    @property
    def d_y(self) -> int:
        return self.Y_fit.shape[1]


def _load_dataset(config: ExperimentConfig) -> Dataset:
    src = config.source
    if isinstance(src, SyntheticSource):
        return synthetic_views(src.n, src.latent_dim, src.d_x, src.d_y, src.noise, src.seed)
    return load_csv(
        src.path, src.x_columns, src.y_columns, src.has_header, src.delimiter
    )


def _prepare_full(config: ExperimentConfig) -> tuple[np.ndarray, np.ndarray, float, float]:
    """Copula both views (Y optionally exempt) and resolve the bandwidths."""
    dataset = _load_dataset(config)
    X = copula_transform(dataset.X)
    Y = copula_transform(dataset.Y) if config.transform_y else dataset.Y

    if config.sigma_mode == "fixed":
        sigma_x = float(config.sigma_value)
    else:
        sigma_x = bandwidth_heuristic(X, config.sigma_k)
    sigma_y = (
        float(config.sigma_y_value) if config.sigma_y_mode == "fixed" else sigma_x
    )
    return X, Y, sigma_x, sigma_y


def _prepare(config: ExperimentConfig) -> _Prepared:
    X, Y, sigma_x, sigma_y = _prepare_full(config)
    if config.split is None:
        return _Prepared(X, Y, X, Y, sigma_x, sigma_y)
    idx = split(X.shape[0], config.split, _purpose_seed(config.master_seed, "split"))
    return _Prepared(
        X[idx.train], Y[idx.train], X[idx.test], Y[idx.test], sigma_x, sigma_y
    )


def _pool_pair(prep: _Prepared, M0: int, seed: int, map_kind, sampler):
    pool_x = sample_pool(
        prep.d_x, M0, prep.sigma_x, map_kind, sampler, _purpose_seed(seed, "pool_x")
    )
    pool_y = sample_pool(
        prep.d_y, M0, prep.sigma_y, map_kind, sampler, _purpose_seed(seed, "pool_y")
    )
    return pool_x, pool_y


def _solve_rcca(Zx: FeatureMatrix, Zy: FeatureMatrix, mu: float):
    start = time.perf_counter()
    result = rcca(Zx, Zy, mu)
    return result, (time.perf_counter() - start) * 1e3


def _solve_against_y(Zx: FeatureMatrix, y: np.ndarray, mu: float):
    start = time.perf_counter()
    result = linear_cca(Zx.values, y[:, None], mu)
    return result, (time.perf_counter() - start) * 1e3


def _require_scalar_y(prep: _Prepared, algorithm: str) -> np.ndarray:
    if prep.d_y != 1:
        raise ConfigError(f"{algorithm} requires a 1-column Y view, got d_y={prep.d_y}")
    return prep.Y_fit[:, 0]


def _run_cell(
    algorithm: str,
    prep: _Prepared,
    M: int,
    config: ExperimentConfig,
    lambda_ls: float | None,
    seed: int,
) -> tuple[CcaResult, float, float]:
    """One (algorithm, M) run; returns (result, select_ms, cca_ms)."""
    M0 = config.pool_factor * M
    mu = config.mu
    start = time.perf_counter()

    if algorithm == "RFF":
        pool_x, pool_y = _pool_pair(
            prep, M0, seed, FeatureMapKind.COSINE_WITH_OFFSET, SamplerKind.IID_GAUSSIAN
        )
        Zx = feature_matrix(prep.X_eval, pool_x, M)
        Zy = feature_matrix(prep.Y_eval, pool_y, M)
        select_ms = (time.perf_counter() - start) * 1e3
        result, cca_ms = _solve_rcca(Zx, Zy, mu)

    elif algorithm == "ORF":
        pool_x, pool_y = _pool_pair(
            prep, M0, seed, FeatureMapKind.COS_SIN_PAIR, SamplerKind.ORTHOGONAL
        )
        m_pairs = -(-M // 2)  # half the budget; each feature yields two columns
        Zx = feature_matrix(prep.X_eval, pool_x, m_pairs)
        Zy = feature_matrix(prep.Y_eval, pool_y, m_pairs)
        select_ms = (time.perf_counter() - start) * 1e3
        result, cca_ms = _solve_rcca(Zx, Zy, mu)

    elif algorithm == "LS":
        if lambda_ls is None:
            raise ConfigError("LS requires a resolved lambda")
        pool_x, pool_y = _pool_pair(
            prep, M0, seed, FeatureMapKind.COSINE_WITH_OFFSET, SamplerKind.IID_GAUSSIAN
        )
        sel_x = sample_proportional(
            ls_scores(feature_matrix(prep.X_fit, pool_x, M0), lambda_ls),
            M,
            _purpose_seed(seed, "sample_x"),
        )
        sel_y = sample_proportional(
            ls_scores(feature_matrix(prep.Y_fit, pool_y, M0), lambda_ls),
            M,
            _purpose_seed(seed, "sample_y"),
        )
        Zx = reweighted_feature_matrix(
            prep.X_eval, pool_x, sel_x.indices, sel_x.weight_ratios
        )
        Zy = reweighted_feature_matrix(
            prep.Y_eval, pool_y, sel_y.indices, sel_y.weight_ratios
        )
        select_ms = (time.perf_counter() - start) * 1e3
        result, cca_ms = _solve_rcca(Zx, Zy, mu)

    elif algorithm == "EERF":
        y_fit = _require_scalar_y(prep, algorithm)
        pool_x = sample_pool(
            prep.d_x,
            M0,
            prep.sigma_x,
            FeatureMapKind.COSINE_WITH_OFFSET,
            SamplerKind.IID_GAUSSIAN,
            _purpose_seed(seed, "pool_x"),
        )
        chosen = select_top_m(
            eerf_scores(feature_matrix(prep.X_fit, pool_x, M0), y_fit), M
        )
        Zx = feature_matrix(prep.X_eval, pool_x.take(chosen.indices), M)
        select_ms = (time.perf_counter() - start) * 1e3
        result, cca_ms = _solve_against_y(Zx, prep.Y_eval[:, 0], mu)

    elif algorithm == "ORCCA1":
        y_fit = _require_scalar_y(prep, algorithm)
        pool_x = sample_pool(
            prep.d_x,
            M0,
            prep.sigma_x,
            FeatureMapKind.COSINE_WITH_OFFSET,
            SamplerKind.IID_GAUSSIAN,
            _purpose_seed(seed, "pool_x"),
        )
        scores = orcca1_scores(feature_matrix(prep.X_fit, pool_x, M0), y_fit, mu)
        chosen = select_top_m(scores, M)
        Zx = feature_matrix(prep.X_eval, pool_x.take(chosen.indices), M)
        select_ms = (time.perf_counter() - start) * 1e3
        result, cca_ms = _solve_against_y(Zx, prep.Y_eval[:, 0], mu)

    elif algorithm == "ORCCA2":
        pool_x, pool_y = _pool_pair(
            prep, M0, seed, FeatureMapKind.COSINE_WITH_OFFSET, SamplerKind.IID_GAUSSIAN
        )
        qx, qy = orcca2_scores(
            feature_matrix(prep.X_fit, pool_x, M0),
            feature_matrix(prep.Y_fit, pool_y, M0),
            mu,
        )
        Zx = feature_matrix(prep.X_eval, pool_x.take(select_top_m(qx, M).indices), M)
        Zy = feature_matrix(prep.Y_eval, pool_y.take(select_top_m(qy, M).indices), M)
        select_ms = (time.perf_counter() - start) * 1e3
        result, cca_ms = _solve_rcca(Zx, Zy, mu)

    else:
        raise ConfigError(f"algorithm {algorithm!r} has no benchmark pipeline")

    return result, select_ms, cca_ms


def _resolve_ls_lambda(
    prep: _Prepared, M: int, config: ExperimentConfig
) -> float:
    """Pick the leverage regularizer by total correlation on a held-out repetition."""
    if config.lambda_ls is not None:
        return config.lambda_ls
    holdout_seed = derive_seed(config.master_seed, "LS", M, config.repetitions)
    n_fit = prep.X_fit.shape[0]
    best_lambda, best_total = None, -np.inf
    for factor in LS_LAMBDA_GRID:
        candidate = factor * n_fit
        result, _, _ = _run_cell("LS", prep, M, config, candidate, holdout_seed)
        if result.total > best_total:
            best_lambda, best_total = candidate, result.total
    return best_lambda


def run_benchmark(config: ExperimentConfig) -> list[MetricsRow]:
    """All (algorithm, M, repetition) rows, sorted by (algorithm, M, repetition).

    A KCCA entry in the roster contributes a single exact-kernel baseline row
    on top of the grid rows.
    """
    config.validate()
    prep = _prepare(config)

    rows: list[MetricsRow] = []
    for algorithm in config.algorithms:
        if algorithm == "KCCA":
            continue
        for M in config.M_grid:
            lambda_ls = (
                _resolve_ls_lambda(prep, M, config) if algorithm == "LS" else None
            )
            for repetition in range(config.repetitions):
                seed = derive_seed(config.master_seed, algorithm, M, repetition)
                result, select_ms, cca_ms = _run_cell(
                    algorithm, prep, M, config, lambda_ls, seed
                )
                rows.append(
                    MetricsRow(
                        algorithm=algorithm,
                        M=M,
                        repetition=repetition,
                        seed=seed,
                        total_cc=result.total,
                        top10_cc=result.top10,
                        largest_cc=result.largest,
                        select_time_ms=select_ms,
                        cca_time_ms=cca_ms,
                    )
                )
    if "KCCA" in config.algorithms:
        rows.append(run_kcca_baseline(config))
    rows.sort(key=lambda row: (row.algorithm, row.M, row.repetition))
    return rows


def run_kcca_baseline(config: ExperimentConfig) -> MetricsRow:
    """Exact-kernel KCCA on the full dataset; refuses above the size guard."""
    config.validate()
    if config.mu <= 0:
        raise ConfigError("the exact KCCA baseline requires mu > 0")
    X, Y, sigma_x, sigma_y = _prepare_full(config)
    if X.shape[0] > config.kcca_max_n:
        raise DataError(
            f"exact KCCA refused: n={X.shape[0]} exceeds the guard "
            f"kcca_max_n={config.kcca_max_n}"
        )
    start = time.perf_counter()
    Kx = gaussian_kernel(X, sigma_x)
    Ky = gaussian_kernel(Y, sigma_y)
    select_ms = (time.perf_counter() - start) * 1e3
    start = time.perf_counter()
    result = kcca(Kx, Ky, config.mu)
    cca_ms = (time.perf_counter() - start) * 1e3
    return MetricsRow(
        algorithm="KCCA",
        M=0,
        repetition=0,
        seed=config.master_seed,
        total_cc=result.total,
        top10_cc=result.top10,
        largest_cc=result.largest,
        select_time_ms=select_ms,
        cca_time_ms=cca_ms,
    )


@dataclass(frozen=True)
class SpectralRunResult:
    """Per-trial spectral diagnostics plus the matching sufficient feature counts."""

    lam: float
    s_lambda: float
    M: int
    weighting: str
    deltas_achieved: tuple[float, ...]
    hold_fractions: dict[float, float]
    required: dict[float, int]
    rff_required: dict[float, int]

    def as_records(self) -> list[str]:
        lines = [
            f"lambda={self.lam!r}",
            f"s_lambda={self.s_lambda!r}",
            f"M={self.M}",
            f"weighting={self.weighting}",
            f"trials={len(self.deltas_achieved)}",
        ]
        lines += [
            f"trial_{i}_delta_achieved={d!r}"
            for i, d in enumerate(self.deltas_achieved)
        ]
        for delta in sorted(self.hold_fractions):
            lines.append(f"holds_at_{delta:g}={self.hold_fractions[delta]!r}")
        for delta in sorted(self.required):
            lines.append(f"required_features_{delta:g}={self.required[delta]}")
        for delta in sorted(self.rff_required):
            lines.append(f"rff_required_features_{delta:g}={self.rff_required[delta]}")
        return lines


def run_spectral_check(
    config: ExperimentConfig,
    M: int,
    lam: float,
    deltas: tuple[float, ...] = (0.5,),
    trials: int = 50,
    weighting: str = "ls",
    rho: float = 0.1,
) -> SpectralRunResult:
    """Empirical spectral-approximation rates on the X view's exact kernel.

    Weighting modes: "plain" samples M prior features; "ls" samples M from a
    pool_factor * M pool proportional to the exact-kernel leverage rule with
    importance reweighting; "exact" factorizes the kernel itself (a zero-error
    control). Transforms carry the variance correction so their Gram targets
    the exact kernel.
    """
    config.validate()
    if weighting not in ("plain", "ls", "exact"):
        raise ConfigError(f"weighting must be plain|ls|exact, got {weighting!r}")
    if lam <= 0:
        raise ConfigError(f"lambda must be positive, got {lam}")
    if M < 1 or trials < 1:
        raise ConfigError("M and trials must be >= 1")

    prep = _prepare(config)
    X = prep.X_fit
    if X.shape[0] > config.kcca_max_n:
        raise DataError(
            f"exact kernel refused: n={X.shape[0]} exceeds kcca_max_n={config.kcca_max_n}"
        )
    K = gaussian_kernel(X, prep.sigma_x)
    n = K.n
    s_lambda = effective_dimension(K, lam)
    correction = variance_correction(FeatureMapKind.COSINE_WITH_OFFSET)

    ls_center = None
    if weighting == "ls":
        ls_center = np.linalg.inv(K.values + lam * np.eye(n))

    exact_Z = None
    if weighting == "exact":
        eigs, vecs = np.linalg.eigh(K.values)
        exact_Z = vecs * np.sqrt(np.maximum(eigs, 0.0))[np.newaxis, :]

    deltas = tuple(float(d) for d in deltas)
    achieved = []
    held = {d: 0 for d in deltas}
    for trial in range(trials):
        seed = derive_seed(config.master_seed, f"spectral:{weighting}", M, trial)
        if weighting == "exact":
            W = exact_Z
        elif weighting == "plain":
            pool = sample_pool(
                X.shape[1], M, prep.sigma_x, seed=_purpose_seed(seed, "pool")
            )
            W = feature_matrix(X, pool, M).values * correction
        else:
            M0 = config.pool_factor * M
            pool = sample_pool(
                X.shape[1], M0, prep.sigma_x, seed=_purpose_seed(seed, "pool")
            )
            Z0 = feature_matrix(X, pool, M0)
            scores = score_general(
                FeatureMatrix(values=Z0.values * correction), ls_center
            )
            sel = sample_proportional(scores, M, _purpose_seed(seed, "sample"))
            Zt = reweighted_feature_matrix(X, pool, sel.indices, sel.weight_ratios)
            W = Zt.weighted_values() * correction
        report = spectral_check(K, W, lam, deltas)
        achieved.append(report.delta_achieved)
        for d in deltas:
            held[d] += report.holds_at[d]

    valid = [d for d in deltas if 0.0 < d <= 0.5]
    return SpectralRunResult(
        lam=float(lam),
        s_lambda=s_lambda,
        M=M,
        weighting=weighting,
        deltas_achieved=tuple(achieved),
        hold_fractions={d: held[d] / trials for d in deltas},
        required={d: required_features(s_lambda, s_lambda, d, 0.0, rho) for d in valid},
        rff_required={d: rff_required_features(n, lam, s_lambda, d, rho) for d in valid},
    )


def run_select(
    config: ExperimentConfig, rule: str, M: int
) -> dict[str, tuple[ScoreVector, Selection]]:
    """Score a fresh pool with one rule and select; for inspection dumps.

    Returns per-view (scores, selection) pairs: the X view always, the Y view
    for the two-sided rule.
    """
    config.validate()
    rule = rule.lower()
    if rule not in ("ls", "eerf", "orcca1", "orcca2"):
        raise ConfigError(f"rule must be ls|eerf|orcca1|orcca2, got {rule!r}")
    prep = _prepare(config)
    M0 = config.pool_factor * M
    seed = derive_seed(config.master_seed, f"select:{rule}", M, 0)
    if rule in ("eerf", "orcca1") and prep.d_y != 1:
        raise ConfigError(f"{rule} requires a 1-column Y view, got d_y={prep.d_y}")
    if config.mu <= 0 and rule in ("orcca1", "orcca2"):
        raise ConfigError(f"{rule} scores require mu > 0")

    pool_x, pool_y = _pool_pair(
        prep, M0, seed, FeatureMapKind.COSINE_WITH_OFFSET, SamplerKind.IID_GAUSSIAN
    )
    Zx = feature_matrix(prep.X_fit, pool_x, M0)
    if rule == "ls":
        lam = config.lambda_ls if config.lambda_ls is not None else _resolve_ls_lambda(
            prep, M, config
        )
        scores = ls_scores(Zx, lam)
        return {"x": (scores, sample_proportional(scores, M, _purpose_seed(seed, "sample_x")))}
    if rule == "eerf":
        scores = eerf_scores(Zx, prep.Y_fit[:, 0])
        return {"x": (scores, select_top_m(scores, M))}
    if rule == "orcca1":
        scores = orcca1_scores(Zx, prep.Y_fit[:, 0], config.mu)
        return {"x": (scores, select_top_m(scores, M))}
    Zy = feature_matrix(prep.Y_fit, pool_y, M0)
    qx, qy = orcca2_scores(Zx, Zy, config.mu)
    return {
        "x": (qx, select_top_m(qx, M)),
        "y": (qy, select_top_m(qy, M)),
    }


def write_metrics_csv(rows, stream, no_timing: bool = False) -> None:
    """Emit the fixed-header benchmark CSV; timings blank under no_timing."""
    stream.write(CSV_HEADER + "\n")
    for row in rows:
        stream.write(",".join(row.csv_cells(no_timing)) + "\n")
