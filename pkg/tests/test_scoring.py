import numpy as np
import pytest

from rfcca import (
    FeatureMatrix,
    ParameterError,
    ScoreRule,
    ScoreVector,
    SelectionMode,
    eerf_scores,
    feature_matrix,
    ls_scores,
    orcca1_scores,
    orcca2_scores,
    sample_pool,
    sample_proportional,
    score_general,
    select_top_m,
)


def random_transform(n, M0, seed, d=2):
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((n, d))
    pool = sample_pool(d, M0, 1.0, seed=seed)
    return feature_matrix(X, pool, M0)


def relative_max_error(a, b):
    return np.max(np.abs(a - b)) / max(np.max(np.abs(b)), 1e-300)


# --------------------------------------------------------------- score_general

def test_zero_center_gives_zero_scores():
    Z = random_transform(10, 6, 0)
    assert score_general(Z, np.zeros((10, 10))).scores == pytest.approx(np.zeros(6))


def test_identity_center_gives_column_norms():
    Z = random_transform(10, 6, 1)
    expected = np.einsum("im,im->m", Z.values, Z.values)
    scores = score_general(Z, np.eye(10)).scores
    assert scores == pytest.approx(expected)
    assert np.all(scores >= 0.0)


def test_general_with_inverse_gram_center_equals_leverage():
    Z = random_transform(30, 50, 2)
    lam = 0.7
    B = np.linalg.inv(Z.values @ Z.values.T + lam * np.eye(30))
    assert np.max(np.abs(score_general(Z, B).scores - ls_scores(Z, lam).scores)) <= 1e-10


def test_score_general_rejects_weighted_input():
    Z = random_transform(8, 4, 3)
    weighted = FeatureMatrix(values=Z.values, weights=np.ones(4), map_kind=Z.map_kind)
    with pytest.raises(ParameterError):
        score_general(weighted, np.eye(8))


# -------------------------------------------------------------------- ls_scores

def test_leverage_scores_sum_to_effective_dimension():
    Z = random_transform(25, 40, 4)
    lam = 0.5
    gram = Z.values @ Z.values.T
    eigs = np.linalg.eigvalsh(gram)
    assert ls_scores(Z, lam).scores.sum() == pytest.approx(
        np.sum(np.maximum(eigs, 0) / (np.maximum(eigs, 0) + lam)), abs=1e-9
    )


def test_orthogonal_columns_share_one_score():
    # columns scaled e_i: squared norm c each
    c = 0.37
    values = np.sqrt(c) * np.eye(5)[:, :3]
    Z = FeatureMatrix(values=values, scale_applied=False)
    lam = 0.9
    assert ls_scores(Z, lam).scores == pytest.approx(np.full(3, c / (c + lam)))


def test_leverage_dual_form_per_column():
    Z = random_transform(40, 60, 5)
    lam = 0.3
    inv = np.linalg.inv(Z.values @ Z.values.T + lam * np.eye(40))
    dual = np.einsum("im,im->m", Z.values, inv @ Z.values)
    assert np.max(np.abs(ls_scores(Z, lam).scores - dual)) <= 1e-10


def test_leverage_scores_in_unit_interval():
    Z = random_transform(20, 35, 6)
    scores = ls_scores(Z, 0.01).scores
    assert np.all(scores >= 0.0)
    assert np.all(scores < 1.0)
    with pytest.raises(ParameterError):
        ls_scores(Z, 0.0)


# ------------------------------------------------------------------ eerf_scores

def test_eerf_zero_targets():
    Z = random_transform(12, 7, 7)
    assert eerf_scores(Z, np.zeros(12)).scores == pytest.approx(np.zeros(7))


def test_eerf_hand_example():
    y = np.array([1.0, -1.0])
    Z = FeatureMatrix(values=np.array([[1.0, 1.0], [1.0, -1.0]]), scale_applied=False)
    assert eerf_scores(Z, y).scores == pytest.approx(np.array([0.0, 1.0]))


def test_eerf_ranking_matches_quadratic_form():
    Z = random_transform(18, 25, 8)
    y = np.random.default_rng(8).standard_normal(18)
    eerf_order = np.argsort(-eerf_scores(Z, y).scores, kind="stable")
    quad_order = np.argsort(-score_general(Z, np.outer(y, y)).scores, kind="stable")
    assert np.array_equal(eerf_order, quad_order)


def test_eerf_length_mismatch():
    Z = random_transform(10, 5, 9)
    with pytest.raises(ParameterError):
        eerf_scores(Z, np.ones(9))


# ---------------------------------------------------------------- orcca1_scores

def test_orcca1_zero_target():
    Z = random_transform(14, 9, 10)
    assert orcca1_scores(Z, np.zeros(14), 0.1).scores == pytest.approx(np.zeros(9))


def test_orcca1_dual_form_per_column():
    Z = random_transform(30, 40, 11)
    y = np.random.default_rng(11).standard_normal(30)
    mu = 0.05
    center = np.linalg.solve(Z.values @ Z.values.T + mu * np.eye(30), np.outer(y, y))
    dual = np.einsum("im,im->m", Z.values, center @ Z.values)
    assert np.max(np.abs(orcca1_scores(Z, y, mu).scores - dual)) <= 1e-10


def test_orcca1_single_feature_closed_form():
    rng = np.random.default_rng(12)
    u = rng.standard_normal(9)
    y = rng.standard_normal(9)
    mu = 0.4
    Z = FeatureMatrix(values=u[:, None], scale_applied=False)
    assert orcca1_scores(Z, y, mu).scores[0] == pytest.approx((u @ y) ** 2 / (u @ u + mu))


def test_orcca1_requires_positive_mu():
    Z = random_transform(8, 4, 13)
    with pytest.raises(ParameterError):
        orcca1_scores(Z, np.ones(8), 0.0)


# ---------------------------------------------------------------- orcca2_scores

def test_orcca2_trace_identity():
    Zx = random_transform(22, 31, 14)
    Zy = random_transform(22, 27, 15)
    qx, qy = orcca2_scores(Zx, Zy, 0.2)
    assert qx.scores.sum() == pytest.approx(qy.scores.sum(), rel=1e-10)


def test_orcca2_zero_second_view():
    Zx = random_transform(10, 8, 16)
    Zy = FeatureMatrix(values=np.zeros((10, 6)), scale_applied=False)
    qx, qy = orcca2_scores(Zx, Zy, 0.3)
    assert qx.scores == pytest.approx(np.zeros(8))
    assert qy.scores == pytest.approx(np.zeros(6))


def test_orcca2_dual_form_per_column():
    Zx = random_transform(30, 40, 17)
    Zy = random_transform(30, 40, 18)
    mu = 0.07
    Kx = Zx.values @ Zx.values.T
    Ky = Zy.values @ Zy.values.T
    center = np.linalg.solve(
        Kx + mu * np.eye(30), Ky @ np.linalg.inv(Ky + mu * np.eye(30))
    )
    dual = np.einsum("im,im->m", Zx.values, center @ Zx.values)
    qx, _ = orcca2_scores(Zx, Zy, mu)
    assert relative_max_error(qx.scores, dual) <= 1e-9


def test_orcca2_row_mismatch():
    Zx = random_transform(10, 5, 19)
    Zy = random_transform(11, 5, 20)
    with pytest.raises(ParameterError):
        orcca2_scores(Zx, Zy, 0.1)


def test_orcca2_reduces_to_orcca1_ranking_on_vector_view():
    # a single raw-y column as the second view scales every score by the same
    # positive constant, so the rankings agree exactly
    Zx = random_transform(30, 40, 21)
    y = np.random.default_rng(21).standard_normal(30)
    mu = 1e-3
    Zy = FeatureMatrix(values=y[:, None], scale_applied=False)
    qx, _ = orcca2_scores(Zx, Zy, mu)
    q1 = orcca1_scores(Zx, y, mu)
    assert np.array_equal(
        np.argsort(-qx.scores, kind="stable"), np.argsort(-q1.scores, kind="stable")
    )


# ----------------------------------------------------------------- select_top_m

def make_scores(values):
    return ScoreVector(scores=np.asarray(values, dtype=float), rule=ScoreRule("general"))


def test_full_selection_preserves_order():
    chosen = select_top_m(make_scores([0.3, 0.1, 0.9, 0.2]), 4)
    assert np.array_equal(chosen.indices, np.arange(4))
    assert chosen.mode is SelectionMode.TOP_M
    assert chosen.weight_ratios is None


def test_tie_break_prefers_smaller_index():
    chosen = select_top_m(make_scores([0.5, 0.9, 0.5]), 2)
    assert np.array_equal(chosen.indices, np.array([1, 0]))


def test_negative_scores_are_ordered():
    chosen = select_top_m(make_scores([-1.0, -2.0]), 1)
    assert np.array_equal(chosen.indices, np.array([0]))


def test_top_m_scale_invariance_and_bounds():
    scores = make_scores([0.2, -0.4, 0.8, 0.1, 0.5])
    scaled = make_scores([2.0 * s for s in (0.2, -0.4, 0.8, 0.1, 0.5)])
    assert np.array_equal(select_top_m(scores, 3).indices, select_top_m(scaled, 3).indices)
    with pytest.raises(ParameterError):
        select_top_m(scores, 6)


def test_greedy_sum_is_maximal_over_subsets():
    from itertools import combinations

    values = np.random.default_rng(22).standard_normal(8)
    chosen = select_top_m(make_scores(values), 3)
    best = max(sum(values[list(c)]) for c in combinations(range(8), 3))
    assert sum(values[chosen.indices]) == pytest.approx(best)


# ---------------------------------------------------------- sample_proportional

def test_uniform_scores_give_unit_ratios():
    chosen = sample_proportional(make_scores([2.0, 2.0, 2.0, 2.0]), 6, seed=0)
    assert chosen.mode is SelectionMode.SAMPLED_PROPORTIONAL
    assert chosen.weight_ratios == pytest.approx(np.ones(6))


def test_degenerate_distribution_picks_single_index():
    chosen = sample_proportional(make_scores([0.0, 0.0, 3.0, 0.0]), 5, seed=1)
    assert np.all(chosen.indices == 2)
    assert chosen.weight_ratios == pytest.approx(np.full(5, 0.25))


def test_empirical_frequencies_match_scores():
    chosen = sample_proportional(make_scores([1.0, 1.0, 2.0, 4.0]), 100000, seed=2)
    freqs = np.bincount(chosen.indices, minlength=4) / 100000
    assert freqs == pytest.approx(np.array([0.125, 0.125, 0.25, 0.5]), abs=0.01)


def test_sampling_is_deterministic_per_seed():
    scores = make_scores([1.0, 3.0, 2.0])
    a = sample_proportional(scores, 20, seed=9)
    b = sample_proportional(scores, 20, seed=9)
    assert np.array_equal(a.indices, b.indices)


def test_sampling_rejects_bad_scores():
    with pytest.raises(ParameterError):
        sample_proportional(make_scores([1.0, -0.5]), 2, seed=0)
    with pytest.raises(ParameterError):
        sample_proportional(make_scores([0.0, 0.0]), 2, seed=0)
