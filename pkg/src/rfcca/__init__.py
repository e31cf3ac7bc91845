"""Randomized-feature canonical correlation analysis.

Random Fourier feature pools, data-dependent scoring and selection rules
(leverage scores, energy-based, and correlation-optimal variants),
regularized CCA/KCCA solvers, and spectral-approximation diagnostics, plus
a benchmark CLI tying them together.
"""

from .cca import CcaResult, kcca, linear_cca, rcca, total_correlation_objective
from .data import (
    Dataset,
    SplitIndices,
    bandwidth_heuristic,
    copula_transform,
    load_csv,
    save_csv,
    split,
    synthetic_views,
)
from .errors import ConfigError, DataError, NumericalError, ParameterError, RfccaError
from .experiments import (
    CsvSource,
    ExperimentConfig,
    MetricsRow,
    SpectralRunResult,
    SyntheticSource,
    derive_seed,
    run_benchmark,
    run_kcca_baseline,
    run_select,
    run_spectral_check,
    write_metrics_csv,
)
from .features import (
    FeatureMapKind,
    FeatureMatrix,
    FeaturePool,
    SamplerKind,
    estimate_kernel,
    feature_matrix,
    reweighted_feature_matrix,
    sample_pool,
    variance_correction,
)
from .kernels import (
    KernelMatrix,
    SpectralReport,
    effective_dimension,
    gaussian_kernel,
    kernel_from_features,
    linear_kernel,
    required_features,
    rff_required_features,
    spectral_check,
)
from .scoring import (
    ScoreRule,
    ScoreVector,
    Selection,
    SelectionMode,
    eerf_scores,
    ls_scores,
    orcca1_scores,
    orcca2_scores,
    sample_proportional,
    score_general,
    select_top_m,
)

__version__ = "0.1.0"

__all__ = [
    "CcaResult",
    "ConfigError",
    "CsvSource",
    "DataError",
    "Dataset",
    "ExperimentConfig",
    "FeatureMapKind",
    "FeatureMatrix",
    "FeaturePool",
    "KernelMatrix",
    "MetricsRow",
    "NumericalError",
    "ParameterError",
    "RfccaError",
    "SamplerKind",
    "ScoreRule",
    "ScoreVector",
    "Selection",
    "SelectionMode",
    "SplitIndices",
    "SpectralReport",
    "SpectralRunResult",
    "SyntheticSource",
    "bandwidth_heuristic",
    "copula_transform",
    "derive_seed",
    "eerf_scores",
    "effective_dimension",
    "estimate_kernel",
    "feature_matrix",
    "gaussian_kernel",
    "kcca",
    "kernel_from_features",
    "linear_cca",
    "linear_kernel",
    "load_csv",
    "ls_scores",
    "orcca1_scores",
    "orcca2_scores",
    "rcca",
    "required_features",
    "reweighted_feature_matrix",
    "rff_required_features",
    "run_benchmark",
    "run_kcca_baseline",
    "run_select",
    "run_spectral_check",
    "sample_pool",
    "sample_proportional",
    "save_csv",
    "score_general",
    "select_top_m",
    "spectral_check",
    "split",
    "synthetic_views",
    "total_correlation_objective",
    "variance_correction",
    "write_metrics_csv",
]
