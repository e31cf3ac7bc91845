import math

import numpy as np
import pytest

from rfcca import (
    ParameterError,
    effective_dimension,
    gaussian_kernel,
    kernel_from_features,
    linear_kernel,
    required_features,
    rff_required_features,
    spectral_check,
)


def random_psd(n, seed):
    A = np.random.default_rng(seed).standard_normal((n, n))
    return A @ A.T


# ------------------------------------------------------------ gaussian_kernel

def test_unit_diagonal():
    X = np.random.default_rng(0).standard_normal((8, 3))
    K = gaussian_kernel(X, 2.3).values
    assert np.array_equal(np.diag(K), np.ones(8))


def test_unit_distance_value():
    K = gaussian_kernel(np.array([[0.0], [1.0]]), 1.0).values
    assert K[0, 1] == pytest.approx(0.6065306597, abs=1e-10)


def test_collinear_exponent_additivity():
    # equally spaced collinear points: K13 = K12^4 since (2h)^2 = 4 h^2
    h, sigma = 0.7, 1.4
    X = np.array([[0.0], [h], [2 * h]])
    K = gaussian_kernel(X, sigma).values
    assert K[0, 2] == pytest.approx(K[0, 1] ** 4, rel=1e-12)
    assert K[0, 1] == pytest.approx(K[1, 2], rel=1e-15)


def test_exact_symmetry_and_sigma_check():
    X = np.random.default_rng(1).standard_normal((20, 4))
    K = gaussian_kernel(X, 0.8).values
    assert np.array_equal(K, K.T)
    with pytest.raises(ParameterError):
        gaussian_kernel(X, 0.0)


# -------------------------------------------------------- effective_dimension

def test_identity_kernel_effective_dimension():
    assert effective_dimension(np.eye(9), 1.0) == pytest.approx(4.5)


def test_zero_kernel_effective_dimension():
    assert effective_dimension(np.zeros((5, 5)), 0.3) == pytest.approx(0.0)


def test_matches_dense_solve_oracle():
    K = random_psd(20, 3)
    lam = 0.1
    oracle = float(np.trace(np.linalg.solve(K + lam * np.eye(20), K)))
    assert abs(effective_dimension(K, lam) - oracle) <= 1e-10


def test_monotone_in_lambda_and_bounded():
    K = random_psd(15, 4)
    values = [effective_dimension(K, lam) for lam in (0.01, 0.1, 1.0, 10.0)]
    assert all(a > b for a, b in zip(values, values[1:]))
    for lam, value in zip((0.01, 0.1, 1.0, 10.0), values):
        assert value <= min(15, np.trace(K) / lam) + 1e-9


def test_rejects_nonsymmetric_and_bad_lambda():
    with pytest.raises(ParameterError):
        effective_dimension(np.array([[1.0, 2.0], [0.0, 1.0]]), 1.0)
    with pytest.raises(ParameterError):
        effective_dimension(np.eye(3), 0.0)


# -------------------------------------------------------------- spectral_check

def test_exact_factorization_achieves_zero():
    K = random_psd(6, 5)
    eigs, vecs = np.linalg.eigh(K)
    Z = vecs * np.sqrt(np.maximum(eigs, 0.0))
    report = spectral_check(K, Z, 0.5, [0.1, 0.5])
    assert report.delta_achieved <= 1e-12
    assert report.holds_at == {0.1: True, 0.5: True}


def test_zero_transform_against_identity():
    report = spectral_check(np.eye(4), np.zeros((4, 2)), 1.0, [0.25])
    assert report.delta_achieved == pytest.approx(0.5, abs=1e-12)
    assert report.eig_min == pytest.approx(0.5, abs=1e-12)
    assert report.eig_max == pytest.approx(0.5, abs=1e-12)
    assert report.holds_at[0.25] is False


def test_spectral_check_validates_inputs():
    with pytest.raises(ParameterError):
        spectral_check(np.eye(3), np.zeros((3, 1)), 0.0)
    with pytest.raises(ParameterError):
        spectral_check(np.eye(3), np.zeros((4, 1)), 1.0)


def test_report_record_is_flat_text():
    report = spectral_check(np.eye(4), np.zeros((4, 2)), 1.0, [0.25, 0.75])
    record = report.as_record()
    assert set(record) == {
        "delta_achieved",
        "lambda",
        "eig_min",
        "eig_max",
        "holds_at_0.25",
        "holds_at_0.75",
    }
    assert record["holds_at_0.75"] == "true"
    assert float(record["delta_achieved"]) == pytest.approx(0.5)


def test_kernel_wrappers_round_trip():
    X = np.random.default_rng(6).standard_normal((10, 2))
    K = gaussian_kernel(X, 1.0)
    assert K.kind == "gaussian" and K.sigma == 1.0
    y = np.arange(4.0)
    assert linear_kernel(y).values == pytest.approx(np.outer(y, y))
    Z = np.random.default_rng(7).standard_normal((5, 3))
    assert kernel_from_features(Z).values == pytest.approx(Z @ Z.T)


# ------------------------------------------------------------ bound formulas

def test_required_features_direct_arithmetic():
    assert required_features(5.0, 5.0, 0.5, 0.0, 0.1) == 357


def test_required_features_leverage_reduction():
    # with trace_KB = S_lambda and delta0 = 0 the general bound reduces to
    # ceil((8 S / (3 delta^2)) ln(16 S / rho))
    S, delta, rho = 7.3, 0.4, 0.05
    expected = math.ceil((8 * S) / (3 * delta**2) * math.log(16 * S / rho))
    assert required_features(S, S, delta, 0.0, rho) == expected


def test_required_features_quarter_on_half_delta():
    raw = (8.0 * 5.0) / (3.0 * 0.25**2) * math.log(16 * 5.0 / 0.1)
    assert required_features(5.0, 5.0, 0.25, 0.0, 0.1) == math.ceil(raw)
    assert math.isclose(raw, 4 * (8.0 * 5.0) / (3.0 * 0.5**2) * math.log(800.0))


def test_rff_required_features_direct_arithmetic():
    assert rff_required_features(100, 1.0, 10.0, 0.5, 0.1) == 7870


def test_rff_required_features_scalings():
    base_raw = (8.0 / 3.0) / 0.5**2 * (100 / 1.0) * math.log(1600.0)
    assert rff_required_features(100, 2.0, 10.0, 0.5, 0.1) == math.ceil(base_raw / 2)
    assert rff_required_features(100, 1.0, 10.0, 0.25, 0.1) == math.ceil(4 * base_raw)


@pytest.mark.parametrize(
    "args",
    [
        (5.0, 5.0, 0.0, 0.0, 0.1),
        (5.0, 5.0, 0.6, 0.0, 0.1),
        (5.0, 5.0, 0.5, 1.0, 0.1),
        (5.0, 5.0, 0.5, 0.0, 1.5),
        (-1.0, 5.0, 0.5, 0.0, 0.1),
    ],
)
def test_required_features_range_checks(args):
    with pytest.raises(ParameterError):
        required_features(*args)


def test_rff_required_features_range_checks():
    with pytest.raises(ParameterError):
        rff_required_features(0, 1.0, 10.0, 0.5, 0.1)
    with pytest.raises(ParameterError):
        rff_required_features(10, -1.0, 10.0, 0.5, 0.1)


def test_delta_monotone_under_dominated_gram():
    # when Z Z^T is dominated by K, a larger lambda can only tighten the
    # whitened spread
    K = random_psd(8, 9)
    eigs, vecs = np.linalg.eigh(K)
    Z = vecs * np.sqrt(np.maximum(eigs, 0.0)) * 0.5  # Z Z^T = K/4 <= K
    d_small = spectral_check(K, Z, 0.1).delta_achieved
    d_large = spectral_check(K, Z, 10.0).delta_achieved
    assert d_large <= d_small + 1e-12
