import json

import numpy as np
import pytest

from curvecast import (
    ForecastResult,
    FunctionalDataset,
    Grid,
    IllConditionedError,
    bosq_predict,
    bosq_predict_state_space,
    bosq_score_forecast,
    covariate_matrix,
    eigensystem,
    equivalence_gap,
    predict_fts,
    predict_with_covariates,
    reconstruct,
    sample_acvf,
    scalar_predict,
    scalar_score_forecast,
    scores,
    select_pd,
    solve_blp_with_covariates,
    var_score_forecast,
    ScoreMatrix,
)


def test_var_score_forecast_hand_value():
    pred = var_score_forecast(np.array([1.0, -1.0, 2.0, -2.0]), 1, 1)
    assert pred[0] == pytest.approx(7.0 / 3.0, rel=1e-12)


def test_scalar_forecast_decouples_columns():
    col = np.array([1.0, -1.0, 2.0, -2.0])
    smat = np.column_stack([col, 2.0 * col])
    pred = scalar_score_forecast(smat, 1, 1)
    assert pred[0] == pytest.approx(7.0 / 3.0, rel=1e-12)
    assert pred[1] == pytest.approx(14.0 / 3.0, rel=1e-12)


def test_bosq_score_forecast_hand_value():
    smat = np.array([[-1.5], [-0.5], [0.5], [1.5]])
    pred = bosq_score_forecast(smat, np.array([1.25]))
    assert pred[0] == pytest.approx(0.5, rel=1e-12)


def test_bosq_eigenvalue_guard():
    smat = np.random.default_rng(0).normal(size=(20, 2))
    with pytest.raises(IllConditionedError):
        bosq_score_forecast(smat, np.array([1.0, 1e-15]))


def test_predict_fts_mode_exclusivity(make_far1):
    data = make_far1(n=60)
    with pytest.raises(ValueError):
        predict_fts(data, p=1, d=2, p_max=2, d_max=2)
    with pytest.raises(ValueError):
        predict_fts(data)
    with pytest.raises(ValueError):
        predict_fts(data, p=1)


def test_predict_fts_auto_matches_select(make_far1):
    data = make_far1(n=150, seed=2)
    res = predict_fts(data, p_max=2, d_max=3)
    table = select_pd(data, 2, 3)
    assert (res.p, res.d) == table.best
    assert res.method == "var"


def test_forecast_result_json_round_trip(make_far1):
    data = make_far1(n=80, seed=4)
    res = predict_fts(data, p=1, d=2)
    payload = json.loads(res.to_json())
    assert sorted(payload) == ["curve", "d", "method", "p", "scores"]
    back = ForecastResult.from_json(res.to_json())
    assert back.method == res.method and back.p == res.p and back.d == res.d
    assert np.allclose(back.curve, res.curve)
    assert np.allclose(back.scores, res.scores)


def test_curve_lies_in_eigenspace(make_far1):
    data = make_far1(n=100, seed=6)
    for res in (
        predict_fts(data, p=1, d=3),
        bosq_predict(data, 3),
        scalar_predict(data, 3, 1),
    ):
        eig = eigensystem(data, res.d)
        rebuilt = reconstruct(ScoreMatrix(scores=res.scores[None, :]), eig).values[0]
        assert np.abs(rebuilt - res.curve).max() < 1e-10


def test_forecasts_invariant_to_component_sign_flips(make_far1):
    data = make_far1(n=120, seed=9)
    eig = eigensystem(data, 3)
    smat = scores(data, eig).scores
    signs = np.array([1.0, -1.0, -1.0])
    flipped = smat * signs
    for forecast, args in (
        (var_score_forecast, (2, 1)),
        (scalar_score_forecast, (1, 1)),
        (bosq_score_forecast, (eig.eigenvalues,)),
    ):
        pred = forecast(smat, *args)
        pred_flipped = forecast(flipped, *args)
        # flipping eigenfunction signs flips the scores; the curve
        # prediction mean + sum_l s_l v_l is unchanged
        assert np.allclose(pred_flipped, pred * signs, atol=1e-10)


def test_bosq_state_space_reduces_to_plain():
    data = far_like(seed=3)
    a = bosq_predict(data, 2)
    b = bosq_predict_state_space(data, 2, 1)
    assert np.array_equal(a.curve, b.curve)


def far_like(seed, n=90, T=48):
    rng = np.random.default_rng(seed)
    values = rng.normal(size=(n, T)).cumsum(axis=0) * 0.1 + rng.normal(size=(n, T))
    return FunctionalDataset(grid=Grid(T), values=values)


def test_bosq_state_space_higher_order(make_far1):
    data = make_far1(n=100, seed=13)
    res = bosq_predict_state_space(data, 3, 2)
    assert res.p == 2 and res.curve.shape == (64,)
    assert np.all(np.isfinite(res.curve))


def test_scalar_matches_vector_on_one_component(make_far1):
    data = make_far1(n=90, seed=5)
    a = scalar_predict(data, 1, 1)
    b = predict_fts(data, p=1, d=1)
    assert np.allclose(a.curve, b.curve, atol=1e-10)


def test_zero_covariate_equals_plain_prediction(make_far1):
    data = make_far1(n=100, seed=7)
    rmat = np.zeros((100, 2))
    a = predict_with_covariates(data, rmat, p=1, d=2)
    b = predict_fts(data, p=1, d=2)
    assert np.allclose(a.curve, b.curve, atol=1e-10)


def test_covariate_auto_selection_runs(make_far1):
    data = make_far1(n=150, seed=8)
    rng = np.random.default_rng(1)
    rmat = rng.normal(size=(150, 1))
    res = predict_with_covariates(data, rmat, p_max=2, d_max=3)
    assert res.method == "covariate"
    assert 0 <= res.p <= 2 and 1 <= res.d <= 3


def test_blp_solver_matches_manual_assembly(make_far1):
    data = make_far1(n=200, seed=10)
    rng = np.random.default_rng(2)
    rmat = rng.normal(size=(200, 2))
    res = predict_with_covariates(data, rmat, p=1, d=2, solver="blp")

    eig = eigensystem(data, 2)
    smat = scores(data, eig).scores
    acvf = sample_acvf(smat, 1)
    rc = rmat - rmat.mean(axis=0)
    n = 200
    cross = np.array(
        [smat[1:].T @ rc[:-1] / n, smat.T @ rc / n]
    )  # cross[k] = Cov(Y_t, R_{t - (1 - k)})
    gamma_rr = rc.T @ rc / n
    phis, theta = solve_blp_with_covariates(acvf, cross=cross, gamma_rr=gamma_rr, m=1)
    pred = phis[0] @ smat[-1] + theta @ rc[-1]
    curve = eig.mean + pred @ eig.eigenfunctions
    assert np.allclose(res.curve, curve, atol=1e-8)


def test_covariate_matrix_assembly(make_far1):
    data = make_far1(n=60, seed=12)
    numeric = np.arange(60.0)
    mat = covariate_matrix([data, numeric], 60, dims=[2, None])
    assert mat.shape == (60, 3)
    with pytest.raises(ValueError):
        covariate_matrix(np.ones(59), 60)


def test_equivalence_identity_and_gap(make_far1):
    data = make_far1(n=150, seed=14)
    report = equivalence_gap(data, 3)
    eig = eigensystem(data, 3)
    smat = scores(data, eig).scores
    n = data.n
    lam = np.diag(eig.eigenvalues)
    last = smat[-1]
    # exact rank-one update linking the two lag-zero covariance estimates
    assert np.allclose(
        report.gamma_hat - report.gamma_tilde,
        (lam - np.outer(last, last)) / (n - 1),
        atol=1e-10,
    )
    assert report.gap >= 0.0
    diff = report.var_result.curve - report.bosq_result.curve
    assert report.gap == pytest.approx(float(np.sqrt(diff @ diff / data.T)), rel=1e-10)


def test_equivalence_gap_zero_when_last_curve_is_mean():
    rng = np.random.default_rng(20)
    rows = rng.normal(size=(40, 24))
    # x = mean of all rows including x itself solves to the mean of the others
    rows[-1] = rows[:-1].mean(axis=0)
    data = FunctionalDataset(grid=Grid(24), values=rows)
    report = equivalence_gap(data, 2)
    assert report.gap == pytest.approx(0.0, abs=1e-10)
